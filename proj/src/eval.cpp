#include "stagger/eval.hpp"

#include <cstdio>
#include <set>

#include "stagger/error.hpp"

namespace stagger {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

SpanPrf span_prf(const std::vector<SpanSet>& gold, const std::vector<SpanSet>& pred) {
  if (gold.size() != pred.size()) {
    throw DimensionError("span_prf: " + std::to_string(gold.size()) + " gold sequences, " +
                         std::to_string(pred.size()) + " predicted");
  }
  SpanPrf out;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const std::set<Span> g(gold[s].begin(), gold[s].end());
    const std::set<Span> p(pred[s].begin(), pred[s].end());
    out.gold += g.size();
    out.predicted += p.size();
    for (const Span& span : p) out.true_positives += g.count(span);
  }
  out.degenerate = out.gold == 0 || out.predicted == 0;
  out.precision = ratio(out.true_positives, out.predicted);
  out.recall = ratio(out.true_positives, out.gold);
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

LabelCounts label_counts(const std::vector<std::vector<BioTag>>& gold,
                         const std::vector<std::vector<BioTag>>& pred) {
  if (gold.size() != pred.size()) {
    throw DimensionError("label_accuracy: " + std::to_string(gold.size()) +
                         " gold sequences, " + std::to_string(pred.size()) + " predicted");
  }
  LabelCounts c;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size()) {
      throw DimensionError("label_accuracy: sequence " + std::to_string(s) + " has " +
                           std::to_string(gold[s].size()) + " gold and " +
                           std::to_string(pred[s].size()) + " predicted tags");
    }
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      const bool hit = gold[s][i] == pred[s][i];
      ++c.total;
      c.correct += hit;
      if (gold[s][i] != BioTag::O) {
        ++c.non_o_total;
        c.non_o_correct += hit;
      }
    }
  }
  return c;
}

double label_accuracy(const std::vector<std::vector<BioTag>>& gold,
                      const std::vector<std::vector<BioTag>>& pred) {
  const LabelCounts c = label_counts(gold, pred);
  return ratio(c.correct, c.total);
}

EvalReport evaluate(const std::vector<std::vector<BioTag>>& gold,
                    const std::vector<std::vector<BioTag>>& pred) {
  const LabelCounts c = label_counts(gold, pred);
  std::vector<SpanSet> gs, ps;
  gs.reserve(gold.size());
  ps.reserve(pred.size());
  for (const auto& g : gold) gs.push_back(tag_spans(g));
  for (const auto& p : pred) ps.push_back(tag_spans(p));
  const SpanPrf prf = span_prf(gs, ps);

  EvalReport r;
  r.precision = prf.precision;
  r.recall = prf.recall;
  r.f1 = prf.f1;
  r.true_positives = prf.true_positives;
  r.predicted = prf.predicted;
  r.gold = prf.gold;
  r.tokens_total = c.total;
  r.tokens_correct = c.correct;
  r.non_o_total = c.non_o_total;
  r.non_o_correct = c.non_o_correct;
  r.label_accuracy = ratio(c.correct, c.total);
  r.label_accuracy_non_o = ratio(c.non_o_correct, c.non_o_total);
  r.degenerate = prf.degenerate || c.total == 0;
  return r;
}

EvalReport aggregate(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw DomainError("aggregate of zero reports");
  EvalReport out;
  for (const auto& r : reports) {
    out.precision += r.precision;
    out.recall += r.recall;
    out.f1 += r.f1;
    out.label_accuracy += r.label_accuracy;
    out.label_accuracy_non_o += r.label_accuracy_non_o;
    out.true_positives += r.true_positives;
    out.predicted += r.predicted;
    out.gold += r.gold;
    out.tokens_total += r.tokens_total;
    out.tokens_correct += r.tokens_correct;
    out.non_o_total += r.non_o_total;
    out.non_o_correct += r.non_o_correct;
    out.degenerate = out.degenerate || r.degenerate;
  }
  if (reports.size() > 1) {
    const double k = static_cast<double>(reports.size());
    out.precision /= k;
    out.recall /= k;
    out.f1 /= k;
    out.label_accuracy /= k;
    out.label_accuracy_non_o /= k;
  }
  return out;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

std::string format_f1(double f1) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", f1);
  return buf;
}

std::string format_report(const EvalReport& r, ReportStyle style, const std::string& label) {
  if (style == ReportStyle::Tsv) {
    return label + "\t" + format_percent(r.precision) + "\t" + format_percent(r.recall) + "\t" +
           format_f1(r.f1) + "\t" + format_percent(r.label_accuracy);
  }
  std::string out;
  out += label + "\n";
  out += "  Precision(%)         " + format_percent(r.precision) + "\n";
  out += "  Recall(%)            " + format_percent(r.recall) + "\n";
  out += "  F1-Score             " + format_f1(r.f1) + "\n";
  out += "  Label Accuracy(%)    " + format_percent(r.label_accuracy) + "\n";
  out += "  Non-O Accuracy(%)    " + format_percent(r.label_accuracy_non_o) + "\n";
  out += "  spans: " + std::to_string(r.true_positives) + " correct, " +
         std::to_string(r.predicted) + " predicted, " + std::to_string(r.gold) + " gold\n";
  out += "  tokens: " + std::to_string(r.tokens_correct) + " / " + std::to_string(r.tokens_total) +
         " correct\n";
  if (r.degenerate) out += "  note: degenerate (zero denominator; affected metrics are 0)\n";
  return out;
}

}  // namespace stagger
