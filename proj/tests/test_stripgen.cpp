#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "core/catalog.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/stripgen.hpp"
#include "helpers.hpp"

using termstrip::Attachment;
using termstrip::Catalog;
using termstrip::CounterRng;
using termstrip::GenerationParams;
using termstrip::PartKind;
using termstrip::PlacedPart;
using termstrip::StripConfig;
using termstrip::ValidationError;

namespace {

GenerationParams seeded(std::uint64_t seed) {
  GenerationParams p;
  p.seed = seed;
  return p;
}

bool is_clamp(const PlacedPart& pp) { return pp.kind == PartKind::end_clamp; }

}  // namespace

TEST_SUITE("stripgen") {
  TEST_CASE("deterministic and serialization round-trips") {
    const Catalog& cat = testhelp::reference_catalog();
    const StripConfig a = generate_strip(cat, seeded(42));
    const StripConfig b = generate_strip(cat, seeded(42));
    CHECK(a.to_json_text() == b.to_json_text());
    const StripConfig c = StripConfig::from_json_text(a.to_json_text());
    CHECK(c.to_json_text() == a.to_json_text());
    CHECK(generate_strip(cat, seeded(43)).to_json_text() != a.to_json_text());
  }

  TEST_CASE("structural invariants over a corpus") {
    const Catalog& cat = testhelp::reference_catalog();
    for (std::uint64_t s = 0; s < 300; ++s) {
      const StripConfig strip = generate_strip(cat, seeded(termstrip::derive_stream(1000, s)));
      REQUIRE(!strip.placements.empty());

      double offset = 0.0;
      int blocks = 0;
      for (std::size_t i = 0; i < strip.placements.size(); ++i) {
        const PlacedPart& pp = strip.placements[i];
        CHECK(pp.instance_index == static_cast<int>(i));
        const auto& part = cat.part(pp.part_id);
        CHECK(pp.kind == part.kind);
        // Abutting, non-overlapping, left to right.
        CHECK(pp.rail_offset_mm == doctest::Approx(offset).epsilon(1e-12));
        CHECK(pp.rail_offset_mm + part.width_mm <=
              (i + 1 < strip.placements.size()
                   ? strip.placements[i + 1].rail_offset_mm
                   : strip.total_length_mm) +
                  1e-9);
        offset += part.width_mm;
        if (pp.kind == PartKind::terminal_block) ++blocks;
        // Group index only on blocks.
        CHECK((pp.kind == PartKind::terminal_block) == (pp.group_index >= 0));
      }
      CHECK(strip.total_length_mm == doctest::Approx(offset).epsilon(1e-12));
      CHECK(blocks > 0);

      // Clamps, when present, are exactly the first and last placements.
      std::size_t clamp_count = 0;
      for (const auto& pp : strip.placements)
        if (is_clamp(pp)) ++clamp_count;
      if (clamp_count > 0) {
        CHECK(clamp_count == 2);
        CHECK(is_clamp(strip.placements.front()));
        CHECK(is_clamp(strip.placements.back()));
      }

      // Group runs: consecutive same group_index, length 1..max_group_repeat,
      // one part type per group, adjacent groups differ in type.
      int prev_group = -1;
      int run = 0;
      std::string group_type, prev_group_type;
      for (const auto& pp : strip.placements) {
        if (pp.kind != PartKind::terminal_block) continue;
        if (pp.group_index == prev_group) {
          ++run;
          CHECK(pp.part_id == group_type);
        } else {
          if (prev_group >= 0) {
            CHECK(run >= 1);
            CHECK(run <= strip.params.max_group_repeat);
            CHECK(pp.part_id != group_type);  // rejection rule
          }
          prev_group = pp.group_index;
          prev_group_type = group_type;
          group_type = pp.part_id;
          run = 1;
        }
      }
      CHECK(run <= strip.params.max_group_repeat);

      // Attachment sanity.
      std::map<int, std::vector<std::pair<int, int>>> bridge_spans;  // level -> spans
      for (const auto& pp : strip.placements) {
        const auto& part = cat.part(pp.part_id);
        std::set<int> adapter_shafts;
        for (const auto& a : pp.attachments) {
          switch (a.kind) {
            case Attachment::Kind::marking:
              CHECK(pp.kind == PartKind::terminal_block);
              CHECK(a.point_index >= 0);
              CHECK(a.point_index < part.marking_points);
              CHECK(cat.part(a.part_id).kind == PartKind::marking);
              break;
            case Attachment::Kind::bridge: {
              CHECK(a.first_instance == pp.instance_index);
              CHECK(a.last_instance > a.first_instance);
              for (int i = a.first_instance; i <= a.last_instance; ++i) {
                const auto& host = strip.placements.at(i);
                CHECK(host.kind == PartKind::terminal_block);
                bool bridgeable = false;
                for (const auto& sh : cat.part(host.part_id).shafts)
                  if (sh.shaft_index == a.level) bridgeable = sh.bridgeable;
                CHECK(bridgeable);
              }
              CHECK((a.color == "red" || a.color == "blue"));
              bridge_spans[a.level].push_back({a.first_instance, a.last_instance});
              break;
            }
            case Attachment::Kind::adapter: {
              CHECK(pp.kind == PartKind::terminal_block);
              CHECK_FALSE(strip.adapters_suppressed);
              bool has_shaft = false;
              for (const auto& sh : part.shafts)
                if (sh.shaft_index == a.shaft_index) has_shaft = true;
              CHECK(has_shaft);
              CHECK(adapter_shafts.insert(a.shaft_index).second);  // one per shaft
              bool known_color = false;
              for (const auto& c : strip.params.adapter_colors)
                if (c == a.color) known_color = true;
              CHECK(known_color);
              break;
            }
          }
        }
      }

      // Bridges at one level never overlap, and adapters never sit on a
      // bridged shaft.
      for (auto& [level, spans] : bridge_spans) {
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 0; i + 1 < spans.size(); ++i)
          CHECK(spans[i].second < spans[i + 1].first);
      }
      for (const auto& pp : strip.placements)
        for (const auto& a : pp.attachments) {
          if (a.kind != Attachment::Kind::adapter) continue;
          for (const auto& [level, spans] : bridge_spans) {
            if (level != a.shaft_index) continue;
            for (const auto& span : spans) {
              const bool on_span = span.first <= pp.instance_index &&
                                   pp.instance_index <= span.second;
              CHECK_FALSE(on_span);
            }
          }
        }

      // The block-group loop stops once blocks plus in-line covers pass the
      // threshold.
      int counted = 0;
      for (const auto& pp : strip.placements)
        if (pp.kind == PartKind::terminal_block || pp.kind == PartKind::end_cover)
          ++counted;
      CHECK(counted > strip.params.object_threshold);
      CHECK(static_cast<int>(strip.placements.size()) <=
            strip.params.object_threshold + strip.params.max_group_repeat + 4);
    }
  }

  TEST_CASE("end_cover_required dimension rule") {
    termstrip::PartSpec a;
    a.height_mm = 50.0;
    a.depth_mm = 48.0;
    termstrip::PartSpec b = a;
    b.height_mm = 44.0;  // 44 < 0.9 * 50
    CHECK(termstrip::end_cover_required(a, b, 0.9));
    b.height_mm = 45.0;  // exactly 0.9 * 50: no cover
    CHECK_FALSE(termstrip::end_cover_required(a, b, 0.9));
    b.depth_mm = 43.0;  // 43 < 0.9 * 48
    CHECK(termstrip::end_cover_required(a, b, 0.9));
    CHECK_FALSE(termstrip::end_cover_required(b, a, 0.9));
  }

  TEST_CASE("marking probability extremes") {
    const Catalog& cat = testhelp::reference_catalog();
    GenerationParams p = seeded(5);
    p.p_marking = 1.0;
    StripConfig all = generate_strip(cat, p);
    for (const auto& pp : all.placements) {
      if (pp.kind != PartKind::terminal_block) continue;
      int markings = 0;
      for (const auto& a : pp.attachments)
        if (a.kind == Attachment::Kind::marking) ++markings;
      CHECK(markings == cat.part(pp.part_id).marking_points);
    }
    p.p_marking = 0.0;
    StripConfig none = generate_strip(cat, p);
    for (const auto& pp : none.placements)
      for (const auto& a : pp.attachments)
        CHECK(a.kind != Attachment::Kind::marking);
  }

  TEST_CASE("clamp and suppression probability extremes") {
    const Catalog& cat = testhelp::reference_catalog();
    GenerationParams p = seeded(6);
    p.p_end_clamps = 1.0;
    CHECK(is_clamp(generate_strip(cat, p).placements.front()));
    p.p_end_clamps = 0.0;
    for (const auto& pp : generate_strip(cat, p).placements) CHECK_FALSE(is_clamp(pp));

    p.p_strip_without_adapters = 1.0;
    const StripConfig suppressed = generate_strip(cat, p);
    CHECK(suppressed.adapters_suppressed);
    for (const auto& pp : suppressed.placements)
      for (const auto& a : pp.attachments)
        CHECK(a.kind != Attachment::Kind::adapter);
  }

  TEST_CASE("no bridges without a feasible run") {
    GenerationParams p = seeded(7);
    p.p_bridge_per_run = 1.0;
    const Catalog no_bridge =
        Catalog::from_json_text(testhelp::mini_catalog_text(false));
    const StripConfig strip = generate_strip(no_bridge, p);
    for (const auto& pp : strip.placements)
      for (const auto& a : pp.attachments)
        CHECK(a.kind != Attachment::Kind::bridge);
  }

  TEST_CASE("bridge off switch") {
    const Catalog& cat = testhelp::reference_catalog();
    GenerationParams p = seeded(8);
    p.p_bridge_per_run = 0.0;
    for (const auto& pp : generate_strip(cat, p).placements)
      for (const auto& a : pp.attachments)
        CHECK(a.kind != Attachment::Kind::bridge);
  }

  TEST_CASE("single block type generates without rejection stall") {
    const Catalog one = Catalog::from_json_text(testhelp::mini_catalog_text(true, 1));
    const StripConfig strip = generate_strip(one, seeded(9));
    for (const auto& pp : strip.placements)
      if (pp.kind == PartKind::terminal_block) CHECK(pp.part_id == "blk-a");
  }

  TEST_CASE("covers carry the capped block's material, clamps stay gray") {
    const Catalog& cat = testhelp::reference_catalog();
    for (std::uint64_t s = 100; s < 140; ++s) {
      const StripConfig strip = generate_strip(cat, seeded(s));
      std::string last_block_material = "gray";
      for (const auto& pp : strip.placements) {
        if (pp.kind == PartKind::terminal_block) {
          last_block_material = pp.material.name;
        } else if (pp.kind == PartKind::end_cover) {
          CHECK(pp.material.name == last_block_material);
        } else {
          CHECK(pp.material.name == "gray");
        }
      }
    }
  }

  TEST_CASE("stage functions are replayable on their own streams") {
    const Catalog& cat = testhelp::reference_catalog();
    GenerationParams p = seeded(10);
    StripConfig strip = generate_strip(cat, p);

    // Re-running the marking stage on a bare strip with the same stream
    // reproduces the attachments generate_strip produced.
    StripConfig bare = strip;
    for (auto& pp : bare.placements) pp.attachments.clear();
    bare.adapters_suppressed = false;
    CounterRng marking_rng(termstrip::derive_stream(p.seed, 3));
    place_markings(cat, bare, marking_rng);
    CounterRng bridge_rng(termstrip::derive_stream(p.seed, 4));
    place_bridges(cat, bare, bridge_rng);
    CounterRng adapter_rng(termstrip::derive_stream(p.seed, 5));
    place_test_adapters(cat, bare, adapter_rng);
    CHECK(bare.to_json_text() == strip.to_json_text());
  }

  TEST_CASE("params validation") {
    GenerationParams p;
    p.object_threshold = 0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = GenerationParams{};
    p.p_marking = 1.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = GenerationParams{};
    p.end_cover_ratio = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = GenerationParams{};
    p.adapter_colors.clear();
    CHECK_THROWS_AS(p.validate(), ValidationError);
  }

  TEST_CASE("params json: defaults, overrides, rejects") {
    const GenerationParams defaults = GenerationParams::from_json_text("{}");
    CHECK(defaults.object_threshold == 20);
    CHECK(defaults.p_marking == doctest::Approx(0.7));
    const GenerationParams tweaked =
        GenerationParams::from_json_text(R"({"p_marking": 0.25, "seed": 77})");
    CHECK(tweaked.p_marking == doctest::Approx(0.25));
    CHECK(tweaked.seed == 77);
    CHECK_THROWS_AS(GenerationParams::from_json_text("[1,2]"), termstrip::ParseError);
    CHECK_THROWS_AS(GenerationParams::from_json_text(R"({"p_marking": 2.0})"),
                    ValidationError);
    const GenerationParams round =
        GenerationParams::from_json_text(defaults.to_json_text());
    CHECK(round.to_json_text() == defaults.to_json_text());
  }
}
