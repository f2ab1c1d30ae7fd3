#include <doctest.h>

#include "bitforensics/errors.hpp"
#include "bitforensics/io_ingest.hpp"
#include "synthetic.hpp"

using namespace bitforensics;

TEST_CASE("detection lines parse class, box and confidence") {
  const auto d = parse_detection_lines<DamageClass>("G_G 0.5 0.5 0.1 0.1 0.93\n", true);
  REQUIRE(d.size() == 1);
  CHECK(d[0].label == DamageClass::Green);
  CHECK(d[0].box == BoundingBox{0.5, 0.5, 0.1, 0.1});
  CHECK(d[0].confidence == doctest::Approx(0.93));
}

TEST_CASE("ground-truth lines default to confidence 1") {
  const auto d = parse_detection_lines<LocationClass>("Sh 0.2 0.3 0.05 0.08", false);
  REQUIRE(d.size() == 1);
  CHECK(d[0].label == LocationClass::Shoulder);
  CHECK(d[0].confidence == 1.0);
}

TEST_CASE("comments, blank lines and CRLF are tolerated") {
  const auto d = parse_detection_lines<DamageClass>("# header\n\nH 0.1 0.1 0.1 0.1 0.5\r\n  \nNF 0.2 0.2 0.1 0.1 0.4\n", true);
  CHECK(d.size() == 2);
}

TEST_CASE("the two-token Shoulder RO location is accepted") {
  const auto d = parse_detection_lines<LocationClass>("Shoulder RO 0.4 0.4 0.1 0.1 0.7\nShoulder_RO 0.6 0.4 0.1 0.1 0.7", true);
  REQUIRE(d.size() == 2);
  CHECK(d[0].label == LocationClass::ShoulderRO);
  CHECK(d[1].label == LocationClass::ShoulderRO);
}

TEST_CASE("malformed detection lines report the line") {
  CHECK_THROWS_AS(parse_detection_lines<DamageClass>("G_G 1.5 0.5 0.1 0.1 0.9", true), ParseError);
  CHECK_THROWS_AS(parse_detection_lines<DamageClass>("G_G 0.5 0.5 0.1 0.1", true), ParseError);
  CHECK_THROWS_AS(parse_detection_lines<DamageClass>("G_G 0.5 0.5 0.1 0.1 0.9 0.2", true), ParseError);
  CHECK_THROWS_AS(parse_detection_lines<DamageClass>("G_G 0.5 abc 0.1 0.1 0.9", true), ParseError);
  CHECK_THROWS_AS(parse_detection_lines<DamageClass>("G_G 0.5 0.5 0 0.1 0.9", true), ParseError);
  CHECK_THROWS_AS(parse_detection_lines<DamageClass>("G_G 0.5 0.5 0.1 0.1 1.2", true), ParseError);
  CHECK_THROWS_AS(parse_detection_lines<DamageClass>("XX 0.5 0.5 0.1 0.1 0.9", true), ParseError);
  try {
    parse_detection_lines<DamageClass>("G_G 0.5 0.5 0.1 0.1 0.9\nG_G 0.5 0.5 0.1 0.1 7", true);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("detection lines round-trip through serialization") {
  const std::vector<LocationDetection> dets{{{0.25, 0.5, 0.125, 0.0625}, LocationClass::ShoulderRO, 0.75},
                                            {{0.5, 0.5, 0.5, 0.5}, LocationClass::Top, 1.0}};
  const auto text = serialize_detection_lines<LocationClass>(dets, true);
  CHECK(parse_detection_lines<LocationClass>(text, true) == dets);
}

TEST_CASE("JSON detection files") {
  const auto d = parse_detection_json<DamageClass>(R"([{"class": "M_Th", "cx": 0.3, "cy": 0.4, "w": 0.1, "h": 0.2, "conf": 0.8}])", true);
  REQUIRE(d.size() == 1);
  CHECK(d[0].label == DamageClass::MediumThermal);
  CHECK_THROWS_AS(parse_detection_json<DamageClass>("{}", true), ParseError);
  CHECK_THROWS_AS(parse_detection_json<DamageClass>(R"([{"class": "M_Th", "cx": 0.3}])", true), ParseError);
}

TEST_CASE("cause label rows") {
  const std::string header = std::string(kCauseCsvHeader) + "\n";
  auto rows = parse_cause_labels(header + "15,0,1,0,1,0,0,0,0,0\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].bit_id == "15");
  CHECK(rows[0].causes == CauseLabels{FailureCause::ThermalWear, FailureCause::HardFormationTransition});

  rows = parse_cause_labels(header + "x,0,0,0,0,0,0,0,0,1\n");
  CHECK(rows[0].causes == CauseLabels{FailureCause::Green});

  CHECK_THROWS_AS(parse_cause_labels(header + "y,1,0,0,0,0,0,0,0,1\n"), GreenConflictError);
  CHECK_THROWS_AS(parse_cause_labels("15,0,1,0,1,0,0,0,0,0\n"), ParseError);
  CHECK_THROWS_AS(parse_cause_labels(header + "15,0,1,0,1,0,0,0,0\n"), ParseError);
  CHECK_THROWS_AS(parse_cause_labels(header + "15,0,2,0,1,0,0,0,0,0\n"), ParseError);
}

TEST_CASE("cause labels round-trip") {
  const std::vector<CauseLabelRecord> recs{{"a", {FailureCause::Axial, FailureCause::Whirl}},
                                           {"b", {FailureCause::Green}},
                                           {"c", {}}};
  const auto back = parse_cause_labels(serialize_cause_labels(recs));
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].bit_id == recs[i].bit_id);
    CHECK(back[i].causes == recs[i].causes);
  }
}

TEST_CASE("manifest validation") {
  const auto ok = parse_manifest(R"({"bit_id": "b", "images": [
      {"image_id": "t", "view": "top", "location_file": "t_l.txt", "damage_file": "t_d.txt"},
      {"image_id": "s1", "view": "side", "side_index": 1, "location_file": "s_l.txt", "damage_file": "s_d.txt",
       "gt_location_file": "g.txt"}]})", "/data");
  CHECK(ok.num_main_blades == 7);
  REQUIRE(ok.entries.size() == 2);
  CHECK(ok.entries[0].view == ImageView::top());
  CHECK(ok.entries[1].location_file == std::filesystem::path("/data/s_l.txt"));
  CHECK(ok.entries[1].gt_location_file.has_value());
  CHECK_FALSE(ok.entries[1].gt_damage_file.has_value());

  const auto empty = parse_manifest(R"({"bit_id": "e", "images": []})");
  CHECK(empty.entries.empty());
  CHECK(load_bit(empty).location_images.empty());

  CHECK_THROWS_AS(parse_manifest(R"({"bit_id": "b", "images": [
      {"image_id": "a", "view": "side", "location_file": "x", "damage_file": "y"},
      {"image_id": "a", "view": "side", "location_file": "x", "damage_file": "y"}]})"),
                  ManifestError);
  CHECK_THROWS_AS(parse_manifest(R"({"bit_id": "b", "images": [
      {"image_id": "a", "view": "top", "location_file": "x", "damage_file": "y"},
      {"image_id": "b", "view": "top", "location_file": "x", "damage_file": "y"}]})"),
                  ManifestError);
  CHECK_THROWS_AS(parse_manifest(R"({"bit_id": "", "images": []})"), ManifestError);
  CHECK_THROWS_AS(parse_manifest(R"({"bit_id": "b", "num_main_blades": 0, "images": []})"), ManifestError);
  CHECK_THROWS_AS(parse_manifest(R"({"bit_id": "b", "images": [
      {"image_id": "a", "view": "side", "side_index": 0, "location_file": "x", "damage_file": "y"}]})"),
                  ManifestError);
  CHECK_THROWS_AS(parse_manifest(R"({"bit_id": "b", "images": [
      {"image_id": "a", "view": "front", "location_file": "x", "damage_file": "y"}]})"),
                  ManifestError);
  CHECK_THROWS_AS(parse_manifest("not json"), ManifestError);
}

TEST_CASE("load_bit keeps one record per manifest entry") {
  synth::TempDir tmp;
  synth::BitPlan plan;
  plan.bit_id = "b1";
  plan.cutters = {{LocationClass::Nose, DamageClass::Green, 5}};
  const auto manifest_path = synth::write_bit(tmp.path(), plan);
  const auto manifest = load_manifest(manifest_path);
  CHECK(manifest.entries.size() == 8);
  const auto bit = load_bit(manifest);
  CHECK(bit.location_images.size() == 8);
  CHECK(bit.damage_images.size() == 8);
  CHECK(bit.gt_location_images.size() == 8);
  CHECK(bit.gt_damage_images.size() == 8);

  // Missing detection file is a data error carrying the path.
  auto broken = manifest;
  broken.entries[1].damage_file = tmp.path() / "nope.txt";
  CHECK_THROWS_AS(load_bit(broken), IoError);

  // A malformed file reports file and line.
  write_text_file(tmp.path() / "bad.txt", "G_G 0.5 0.5 0.1 0.1 0.9\nG_G 0.5\n");
  broken = manifest;
  broken.entries[0].damage_file = tmp.path() / "bad.txt";
  try {
    load_bit(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.file().find("bad.txt") != std::string::npos);
  }
}

TEST_CASE("manifest round-trips through JSON") {
  BitManifest m;
  m.bit_id = "x";
  m.num_main_blades = 6;
  m.entries.push_back({"s1", ImageView::side(2), "/d/a.txt", "/d/b.txt", std::filesystem::path("/d/c.txt"), {}});
  const auto back = parse_manifest(manifest_to_json(m, "/d"), "/d");
  CHECK(back.bit_id == "x");
  CHECK(back.num_main_blades == 6);
  REQUIRE(back.entries.size() == 1);
  CHECK(back.entries[0].view == ImageView::side(2));
  CHECK(back.entries[0].location_file == std::filesystem::path("/d/a.txt"));
  CHECK(back.entries[0].gt_location_file == std::filesystem::path("/d/c.txt"));
}
