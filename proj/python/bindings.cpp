#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stagger/cli.hpp"
#include "stagger/crf.hpp"
#include "stagger/error.hpp"
#include "stagger/eval.hpp"
#include "stagger/model_io.hpp"
#include "stagger/selfcheck.hpp"
#include "stagger/synthetic.hpp"
#include "stagger/training.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace stagger;

namespace {

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
  Matrix m(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> a({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), a.mutable_data());
  return a;
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["label_accuracy"] = r.label_accuracy;
  d["label_accuracy_non_o"] = r.label_accuracy_non_o;
  d["true_positives"] = r.true_positives;
  d["predicted"] = r.predicted;
  d["gold"] = r.gold;
  d["tokens_total"] = r.tokens_total;
  d["tokens_correct"] = r.tokens_correct;
  d["degenerate"] = r.degenerate;
  return d;
}

std::string extract(const Model& model, const std::string& title) {
  const TokenSequence tokens = tokenize(title);
  const auto spans = decode_spans(tokens, predict(model, tokens));
  std::string value;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i > 0) value += " | ";
    value += spans[i].text;
  }
  return value;
}

}  // namespace

PYBIND11_MODULE(_stagger, m) {
  m.doc() = "BiLSTM-CRF sequence tagging for attribute extraction";

  // Translators run newest first, so the base class goes in before its subclasses.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  py::enum_<BioTag>(m, "BioTag")
      .value("B", BioTag::B)
      .value("I", BioTag::I)
      .value("O", BioTag::O);

  py::class_<LabeledSequence>(m, "LabeledSequence")
      .def(py::init<>())
      .def(py::init([](TokenSequence tokens, std::vector<BioTag> tags) {
             return LabeledSequence{std::move(tokens), std::move(tags)};
           }),
           py::arg("tokens"), py::arg("tags"))
      .def_readwrite("tokens", &LabeledSequence::tokens)
      .def_readwrite("tags", &LabeledSequence::tags)
      .def("__eq__", [](const LabeledSequence& a, const LabeledSequence& b) { return a == b; });

  m.def("tokenize", &tokenize, py::arg("title"));
  m.def(
      "encode_bio",
      [](const TokenSequence& tokens, std::optional<std::pair<std::size_t, std::size_t>> span) {
        std::optional<Span> s;
        if (span) s = Span{span->first, span->second};
        return encode_bio(tokens, s);
      },
      py::arg("tokens"), py::arg("span") = py::none());
  m.def(
      "decode_spans",
      [](const TokenSequence& tokens, const std::vector<BioTag>& tags) {
        std::vector<std::tuple<std::size_t, std::size_t, std::string>> out;
        for (const auto& e : decode_spans(tokens, tags)) out.emplace_back(e.span.start, e.span.end, e.text);
        return out;
      },
      py::arg("tokens"), py::arg("tags"));
  m.def("read_conll", &read_conll, py::arg("path"), py::arg("attribute") = "attribute");
  m.def("write_conll", &write_conll, py::arg("path"), py::arg("data"),
        py::arg("attribute") = "attribute");

  m.def("log_sum_exp", [](const std::vector<double>& xs) { return log_sum_exp(xs); });
  m.def("make_transitions", [](std::size_t t) { return to_array(make_transitions(t)); });
  m.def("path_score", [](py::array_t<double> e, py::array_t<double> a, const TagPath& y) {
    return path_score(to_matrix(e), to_matrix(a), y);
  });
  m.def("log_partition", [](py::array_t<double> e, py::array_t<double> a) {
    return log_partition(to_matrix(e), to_matrix(a));
  });
  m.def("nll_loss", [](py::array_t<double> e, py::array_t<double> a, const TagPath& gold) {
    CrfLoss l = nll_loss(to_matrix(e), to_matrix(a), gold);
    return py::make_tuple(l.loss, to_array(l.d_emissions), to_array(l.d_transitions));
  });
  m.def("viterbi", [](py::array_t<double> e, py::array_t<double> a) {
    ViterbiResult v = viterbi(to_matrix(e), to_matrix(a));
    return py::make_tuple(v.path, v.score);
  });
  m.def("tag_sequence_no_crf",
        [](py::array_t<double> e) { return tag_sequence_no_crf(to_matrix(e)); });

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_property(
          "variant", [](const ModelConfig& c) { return variant_name(c.variant); },
          [](ModelConfig& c, const std::string& v) { c.variant = parse_variant(v); })
      .def_readwrite("word_dim", &ModelConfig::word_dim)
      .def_readwrite("char_dim", &ModelConfig::char_dim)
      .def_readwrite("hidden", &ModelConfig::hidden)
      .def_readwrite("attention_dim", &ModelConfig::attention_dim)
      .def_readwrite("dropout", &ModelConfig::dropout)
      .def_readwrite("learning_rate", &ModelConfig::learning_rate)
      .def_readwrite("clip_norm", &ModelConfig::clip_norm)
      .def_readwrite("epochs", &ModelConfig::epochs)
      .def_readwrite("folds", &ModelConfig::folds)
      .def_readwrite("seed", &ModelConfig::seed)
      .def_readwrite("min_frequency", &ModelConfig::min_frequency)
      .def_readwrite("lowercase", &ModelConfig::lowercase)
      .def_readwrite("constrain_bio", &ModelConfig::constrain_bio)
      .def_readwrite("attribute", &ModelConfig::attribute)
      .def("validate", &ModelConfig::validate);

  py::class_<Model>(m, "Model")
      .def_property_readonly("config", &Model::config)
      .def("predict", &predict, py::arg("tokens"))
      .def("extract", &extract, py::arg("title"))
      .def("evaluate", [](const Model& model, const std::vector<LabeledSequence>& data) {
        return report_dict(evaluate_model(model, data));
      })
      .def(
          "save",
          [](const Model& model, const std::string& path, std::size_t epochs, std::size_t best_epoch) {
            save_model(path, model, {model.config().seed, epochs, best_epoch, "best"});
          },
          py::arg("path"), py::arg("epochs_completed") = 0, py::arg("best_epoch") = 0)
      .def("parameters", [](const Model& model) {
        py::dict d;
        for (const ParamTensor* p : model.params()) d[py::str(p->name)] = to_array(p->value);
        return d;
      });

  m.def("load_model", [](const std::string& path) { return load_model(path).model; });

  py::class_<EpochRecord>(m, "EpochRecord")
      .def_readonly("epoch", &EpochRecord::epoch)
      .def_readonly("mean_loss", &EpochRecord::mean_loss)
      .def_readonly("val_f1", &EpochRecord::val_f1)
      .def_readonly("val_label_accuracy", &EpochRecord::val_label_accuracy);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("final_model", &TrainResult::final_model)
      .def_readonly("best_model", &TrainResult::best_model)
      .def_readonly("best_epoch", &TrainResult::best_epoch)
      .def_readonly("log", &TrainResult::log);

  m.def(
      "train",
      [](const ModelConfig& config, const std::vector<LabeledSequence>& train_data,
         const std::vector<LabeledSequence>& val_data) {
        py::gil_scoped_release release;
        return train(config, train_data, val_data);
      },
      py::arg("config"), py::arg("train_data"), py::arg("val_data") = std::vector<LabeledSequence>{});

  m.def(
      "cross_validate",
      [](const ModelConfig& config, const std::vector<LabeledSequence>& data, std::size_t parallel) {
        CrossValidation cv;
        {
          py::gil_scoped_release release;
          cv = cross_validate(config, data, parallel);
        }
        py::list folds;
        for (const auto& r : cv.folds) folds.append(report_dict(r));
        return py::make_tuple(folds, report_dict(cv.mean));
      },
      py::arg("config"), py::arg("data"), py::arg("parallel") = 1);

  m.def(
      "evaluate",
      [](const std::vector<std::vector<BioTag>>& gold, const std::vector<std::vector<BioTag>>& pred) {
        return report_dict(evaluate(gold, pred));
      },
      py::arg("gold"), py::arg("pred"));

  m.def(
      "generate_synthetic",
      [](std::size_t titles, std::size_t brands, std::uint64_t seed) {
        return generate_synthetic({titles, brands, 0.1, seed}).data;
      },
      py::arg("num_titles") = 2000, py::arg("num_brands") = 200, py::arg("seed") = 1);

  m.def(
      "selfcheck",
      [](std::size_t trials, std::uint64_t seed, std::size_t grad_seeds, bool perturb) {
        py::list out;
        for (const auto& c : run_selfcheck({trials, seed, grad_seeds, perturb})) {
          py::dict d;
          d["name"] = c.name;
          d["passed"] = c.passed;
          d["detail"] = c.detail;
          d["failing_instance"] = c.failing_instance;
          out.append(d);
        }
        return out;
      },
      py::arg("trials") = 50, py::arg("seed") = 1, py::arg("grad_seeds") = 1,
      py::arg("perturb_gradients") = false);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
