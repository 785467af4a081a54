#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stagger/corpus.hpp"

namespace stagger {

// Gold or predicted spans of one sequence.
using SpanSet = std::vector<Span>;

struct SpanPrf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  bool degenerate = false;  // a denominator was zero
};

// Exact-boundary span matching: a prediction counts only if the same
// (start, end) appears in that sequence's gold set.
SpanPrf span_prf(const std::vector<SpanSet>& gold, const std::vector<SpanSet>& pred);

struct LabelCounts {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t non_o_total = 0;    // tokens whose gold tag is not O
  std::size_t non_o_correct = 0;
};

LabelCounts label_counts(const std::vector<std::vector<BioTag>>& gold,
                         const std::vector<std::vector<BioTag>>& pred);

// Micro-averaged token accuracy.
double label_accuracy(const std::vector<std::vector<BioTag>>& gold,
                      const std::vector<std::vector<BioTag>>& pred);

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double label_accuracy = 0.0;
  double label_accuracy_non_o = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t tokens_total = 0;
  std::size_t tokens_correct = 0;
  std::size_t non_o_total = 0;
  std::size_t non_o_correct = 0;
  bool degenerate = false;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Span metrics and token accuracy for aligned gold/predicted tag sequences.
EvalReport evaluate(const std::vector<std::vector<BioTag>>& gold,
                    const std::vector<std::vector<BioTag>>& pred);

// Unweighted mean of the fractions, summed counts. Throws DomainError on
// an empty list.
EvalReport aggregate(const std::vector<EvalReport>& reports);

enum class ReportStyle { Text, Tsv };

// Percentages with two decimals, F1 with four. TSV is
// label<TAB>precision<TAB>recall<TAB>f1<TAB>label_accuracy.
std::string format_report(const EvalReport& report, ReportStyle style,
                          const std::string& label = "model");

std::string format_percent(double fraction);
std::string format_f1(double f1);

}  // namespace stagger
