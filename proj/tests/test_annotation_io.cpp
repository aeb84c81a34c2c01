#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "helpers.hpp"

using namespace rre;
using Catch::Matchers::ContainsSubstring;
using testutil::TempDir;
using testutil::write_file;

namespace {

const char* kGtSample = R"([
  {
    "image_id": "img_1",
    "variants": [
      {
        "lines": [
          {"points": [0, 0, 10, 0, 10, 4, 0, 4], "transcription": "砂锅炒面"},
          {"points": [0, 6, 8, 6, 8, 9, 0, 9], "transcription": "拌面", "ignore": true}
        ]
      },
      {
        "lines": [
          {"points": [0, 0, 5, 0, 5, 4, 0, 4], "transcription": "砂锅"},
          {"points": [5, 0, 10, 0, 10, 4, 5, 4], "transcription": "炒面"}
        ]
      }
    ]
  },
  {
    "image_id": "img_2",
    "variants": [{"lines": []}]
  }
])";

}  // namespace

TEST_CASE("ground truth parsing", "[annotation]") {
  TempDir td;
  const std::string path = td.file("gt.json");
  write_file(path, kGtSample);

  Diagnostics diag;
  const GroundTruth gt = parse_ground_truth(path, &diag);
  CHECK(diag.warnings.empty());
  REQUIRE(gt.images.size() == 2);
  CHECK(gt.images[0].image_id == "img_1");
  REQUIRE(gt.images[0].variants.size() == 2);
  REQUIRE(gt.images[0].variants[0].lines.size() == 2);
  const TextInstance& first = gt.images[0].variants[0].lines[0];
  CHECK(first.transcription == "砂锅炒面");
  CHECK_FALSE(first.ignore);
  CHECK(first.quad == testutil::axis_box(0, 0, 10, 4));
  CHECK(gt.images[0].variants[0].lines[1].ignore);
  CHECK(gt.images[0].variants[1].lines[0].transcription == "砂锅");
  CHECK(gt.images[1].variants[0].lines.empty());
  REQUIRE(gt.find("img_2") != nullptr);
  CHECK(gt.find("nope") == nullptr);
}

TEST_CASE("ground truth round trip", "[annotation]") {
  TempDir td;
  const std::string path = td.file("gt.json");
  write_file(path, kGtSample);
  const GroundTruth gt = parse_ground_truth(path);

  const std::string again = ground_truth_to_json(gt).dump(1);
  const std::string path2 = td.file("gt2.json");
  write_file(path2, again);
  const GroundTruth gt2 = parse_ground_truth(path2);
  CHECK(gt == gt2);
}

TEST_CASE("ground truth rejections", "[annotation]") {
  TempDir td;
  auto expect_throw = [&](const char* name, const std::string& body,
                          const std::string& needle) {
    const std::string path = td.file(name);
    write_file(path, body);
    try {
      parse_ground_truth(path);
      FAIL("expected parse_error for " << name);
    } catch (const parse_error& e) {
      CHECK_THAT(e.what(), ContainsSubstring(needle));
    }
  };

  expect_throw("notjson.json", "{", "");
  expect_throw("notarray.json", R"({"image_id": "x"})", "array");
  expect_throw("noid.json", R"([{"variants": []}])", "image_id");
  expect_throw("novariants.json", R"([{"image_id": "a", "variants": []}])",
               "variants");
  expect_throw(
      "sevencoords.json",
      R"([{"image_id": "a", "variants": [{"lines": [
          {"points": [0,0,1,0,1,1,0], "transcription": "x"}]}]}])",
      "8 coordinates");
  expect_throw(
      "badnum.json",
      R"([{"image_id": "a", "variants": [{"lines": [
          {"points": [0,0,1,0,1,1,0,"y"], "transcription": "x"}]}]}])",
      "non-numeric");
  expect_throw(
      "notrans.json",
      R"([{"image_id": "a", "variants": [{"lines": [
          {"points": [0,0,1,0,1,1,0,1]}]}]}])",
      "transcription");
  expect_throw(
      "badignore.json",
      R"([{"image_id": "a", "variants": [{"lines": [
          {"points": [0,0,1,0,1,1,0,1], "transcription": "x", "ignore": 1}]}]}])",
      "ignore");
  expect_throw(
      "selfint.json",
      R"([{"image_id": "a", "variants": [{"lines": [
          {"points": [0,0,2,2,2,0,0,2], "transcription": "x"}]}]}])",
      "self-intersecting");
  expect_throw(
      "zeroarea.json",
      R"([{"image_id": "a", "variants": [{"lines": [
          {"points": [0,0,1,1,2,2,3,3], "transcription": "x"}]}]}])",
      "degenerate");
  expect_throw("dupid.json",
               R"([{"image_id": "a", "variants": [{"lines": []}]},
                   {"image_id": "a", "variants": [{"lines": []}]}])",
               "duplicate");
  CHECK_THROWS_AS(parse_ground_truth(td.file("missing.json")), parse_error);
}

TEST_CASE("counter-clockwise ground truth warns", "[annotation]") {
  TempDir td;
  const std::string path = td.file("ccw.json");
  write_file(path, R"([{"image_id": "a", "variants": [{"lines": [
      {"points": [0,0,0,1,1,1,1,0], "transcription": "x"}]}]}])");
  Diagnostics diag;
  const GroundTruth gt = parse_ground_truth(path, &diag);
  CHECK(gt.images.size() == 1);
  REQUIRE(diag.warnings.size() == 1);
  CHECK_THAT(diag.warnings[0], ContainsSubstring("clockwise"));
}

TEST_CASE("label submission parsing", "[annotation]") {
  TempDir td;
  const std::string path = td.file("labels.tsv");
  write_file(path,
             "img_1\t砂锅\r\n"
             "img_2\thello world\n"
             "\n"
             "img_3\t\n"
             "img_4\ttab\tin transcript\n");
  const LabelSubmission sub = parse_label_submission(path);
  REQUIRE(sub.records.size() == 4);
  CHECK(sub.records[0].image_id == "img_1");
  CHECK(*sub.find("img_1") == "砂锅");
  CHECK(*sub.find("img_2") == "hello world");
  CHECK(*sub.find("img_3") == "");
  CHECK(*sub.find("img_4") == "tab\tin transcript");
  CHECK(sub.find("img_5") == nullptr);
}

TEST_CASE("label submission rejections", "[annotation]") {
  TempDir td;
  auto expect_throw = [&](const char* name, const std::string& body,
                          const std::string& needle) {
    const std::string path = td.file(name);
    write_file(path, body);
    try {
      parse_label_submission(path);
      FAIL("expected parse_error for " << name);
    } catch (const parse_error& e) {
      CHECK_THAT(e.what(), ContainsSubstring(needle));
    }
  };
  expect_throw("notab.tsv", "img_1 transcript\n", "TAB");
  expect_throw("dup.tsv", "a\tx\na\ty\n", "duplicate");
  expect_throw("noid.tsv", "\tx\n", "empty image id");
  expect_throw("badutf8.tsv", "a\tok\nb\t\xFF\n", ":2");
}

TEST_CASE("detection submission parsing", "[annotation]") {
  TempDir td;
  const std::string path = td.file("det.tsv");
  write_file(path,
             "img_1\t0,0,10,0,10,4,0,4\n"
             "img_2\t1.5,2.5,9,2.5,9,8,1.5,8\r\n"
             "img_1\t0,6,8,6,8,9,0,9\n");
  Diagnostics diag;
  const DetectionSubmission sub = parse_detection_submission(path, false, &diag);
  CHECK(diag.warnings.empty());
  CHECK(sub.image_order == std::vector<std::string>{"img_1", "img_2"});
  REQUIRE(sub.find("img_1") != nullptr);
  CHECK(sub.find("img_1")->size() == 2);
  CHECK((*sub.find("img_1"))[0].quad == testutil::axis_box(0, 0, 10, 4));
  CHECK((*sub.find("img_1"))[1].source_line == 3);
  CHECK((*sub.find("img_2"))[0].quad.v[0].x == 1.5);
}

TEST_CASE("detection submission with transcripts", "[annotation]") {
  TempDir td;
  const std::string path = td.file("det.tsv");
  write_file(path,
             "img_1\t0,0,10,0,10,4,0,4\t砂锅炒面\n"
             "img_1\t0,6,8,6,8,9,0,9\t\n");
  const DetectionSubmission sub = parse_detection_submission(path, true);
  CHECK(sub.with_transcripts);
  REQUIRE(sub.find("img_1") != nullptr);
  CHECK((*sub.find("img_1"))[0].transcript == "砂锅炒面");
  CHECK((*sub.find("img_1"))[1].transcript.empty());
}

TEST_CASE("detection submission rejections", "[annotation]") {
  TempDir td;
  auto expect_throw = [&](const char* name, const std::string& body,
                          bool with_transcripts, const std::string& needle) {
    const std::string path = td.file(name);
    write_file(path, body);
    try {
      parse_detection_submission(path, with_transcripts);
      FAIL("expected parse_error for " << name);
    } catch (const parse_error& e) {
      CHECK_THAT(e.what(), ContainsSubstring(needle));
    }
  };
  expect_throw("seven.tsv", "a\t0,0,1,0,1,1,0\n", false, "8 coordinates");
  expect_throw("nine.tsv", "a\t0,0,1,0,1,1,0,1,7\n", false, "8 coordinates");
  expect_throw("nonnum.tsv", "a\t0,0,x,0,1,1,0,1\n", false, "non-numeric");
  expect_throw("notab.tsv", "a 0,0,1,0,1,1,0,1\n", false, "TAB");
  expect_throw("extras.tsv", "a\t0,0,1,0,1,1,0,1\textra\n", false, "fields");
  expect_throw("missing.tsv", "a\t0,0,1,0,1,1,0,1\n", true, "fields");
  expect_throw("nan.tsv", "a\tnan,0,1,0,1,1,0,1\n", false, "non-numeric");
  expect_throw("inf.tsv", "a\tinf,0,1,0,1,1,0,1\n", false, "non-numeric");
}

TEST_CASE("prediction quads warn instead of failing", "[annotation]") {
  TempDir td;
  const std::string path = td.file("det.tsv");
  write_file(path,
             "ccw\t0,0,0,4,10,4,10,0\n"
             "degen\t0,0,4,4,8,8,9,9\n"
             "selfx\t0,0,10,10,12,2,0,8\n");
  Diagnostics diag;
  const DetectionSubmission sub = parse_detection_submission(path, false, &diag);
  CHECK(sub.by_image.size() == 3);  // all kept
  REQUIRE(diag.warnings.size() == 3);
  CHECK_THAT(diag.warnings[0], ContainsSubstring("clockwise"));
  CHECK_THAT(diag.warnings[1], ContainsSubstring("degenerate"));
  CHECK_THAT(diag.warnings[2], ContainsSubstring("self-intersecting"));
}

TEST_CASE("coverage helpers", "[annotation]") {
  const GroundTruth gt = testutil::make_gt({
      testutil::gt_entry("a", {{{testutil::inst(testutil::axis_box(0, 0, 1, 1))}}}),
      testutil::gt_entry("b", {{{testutil::inst(testutil::axis_box(0, 0, 1, 1))}}}),
  });
  DetectionSubmission sub = testutil::make_sub(false);
  testutil::add_det(sub, "b", testutil::axis_box(0, 0, 1, 1));
  testutil::add_det(sub, "zzz", testutil::axis_box(0, 0, 1, 1));

  CHECK(missing_image_ids(gt, sub) == std::vector<std::string>{"a"});
  Diagnostics diag;
  detection_coverage_warnings(gt, sub, &diag);
  REQUIRE(diag.warnings.size() == 2);
  CHECK_THAT(diag.warnings[0], ContainsSubstring("a"));
  CHECK_THAT(diag.warnings[1], ContainsSubstring("zzz"));
}
