#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stagger/error.hpp"
#include "stagger/eval.hpp"

using namespace stagger;
using enum BioTag;

namespace {
const std::vector<BioTag> kPadGold{B, I, I, I, O, O, O, O};
}

TEST_CASE("span precision and recall") {
  SpanSet ten;
  for (std::size_t i = 0; i < 10; ++i) ten.push_back({2 * i, 2 * i + 1});
  auto same = span_prf({ten}, {ten});
  CHECK(same.precision == 1.0);
  CHECK(same.recall == 1.0);
  CHECK(same.f1 == 1.0);

  auto partial = span_prf({{{0, 2}}}, {{{0, 1}}});
  CHECK(partial.true_positives == 0);
  CHECK(partial.precision == 0.0);
  CHECK(partial.recall == 0.0);
  CHECK(partial.f1 == 0.0);
  CHECK_FALSE(partial.degenerate);

  auto half = span_prf({{{0, 2}, {4, 5}}}, {{{0, 2}, {3, 5}}});
  CHECK(half.precision == 0.5);
  CHECK(half.recall == 0.5);
  CHECK(half.f1 == 0.5);

  // spans are matched within their own sequence only
  auto cross = span_prf({{{0, 1}}, {}}, {{}, {{0, 1}}});
  CHECK(cross.true_positives == 0);

  auto empty = span_prf({{}}, {{}});
  CHECK(empty.degenerate);
  CHECK(empty.f1 == 0.0);
  CHECK_THROWS_AS(span_prf({{}}, {}), DimensionError);
}

TEST_CASE("label accuracy") {
  CHECK(label_accuracy({kPadGold}, {kPadGold}) == 1.0);
  auto one_wrong = kPadGold;
  one_wrong[5] = B;
  CHECK(label_accuracy({kPadGold}, {one_wrong}) == 0.875);
  CHECK(label_accuracy({kPadGold}, {std::vector<BioTag>(8, O)}) == 0.5);

  auto c = label_counts({kPadGold}, {std::vector<BioTag>(8, O)});
  CHECK(c.non_o_total == 4);
  CHECK(c.non_o_correct == 0);
  CHECK_THROWS_AS(label_accuracy({kPadGold}, {{B, I}}), DimensionError);
}

TEST_CASE("evaluate builds a full report") {
  auto r = evaluate({kPadGold}, {kPadGold});
  CHECK(r.f1 == 1.0);
  CHECK(r.label_accuracy == 1.0);
  CHECK(r.label_accuracy_non_o == 1.0);
  CHECK(r.tokens_total == 8);

  auto none = evaluate({std::vector<BioTag>(3, O)}, {std::vector<BioTag>(3, O)});
  CHECK(none.degenerate);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK(none.label_accuracy == 1.0);
}

TEST_CASE("aggregate") {
  EvalReport a;
  a.f1 = 0.9;
  a.true_positives = 3;
  EvalReport b;
  b.f1 = 1.0;
  b.true_positives = 4;
  CHECK(aggregate({a}) == a);
  auto m = aggregate({a, b});
  CHECK(m.f1 == doctest::Approx(0.95));
  CHECK(m.true_positives == 7);
  CHECK_THROWS_AS(aggregate({}), DomainError);
}

TEST_CASE("report formatting") {
  EvalReport r;
  r.precision = 0.9794;
  r.recall = 0.9412;
  r.f1 = 0.9599;
  r.label_accuracy = 0.9944;
  CHECK(format_percent(r.precision) == "97.94");
  CHECK(format_percent(r.recall) == "94.12");
  CHECK(format_f1(r.f1) == "0.9599");
  CHECK(format_percent(r.label_accuracy) == "99.44");

  const std::string text = format_report(r, ReportStyle::Text, "bilstm-crf");
  CHECK(text.find("97.94") != std::string::npos);
  CHECK(text.find("0.9599") != std::string::npos);

  CHECK(format_report(r, ReportStyle::Tsv, "m") == "m\t97.94\t94.12\t0.9599\t99.44");

  EvalReport zero;
  CHECK(format_report(zero, ReportStyle::Tsv, "z") == "z\t0.00\t0.00\t0.0000\t0.00");
}
