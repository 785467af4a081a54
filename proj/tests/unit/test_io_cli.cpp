#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "stagger/cli.hpp"
#include "stagger/error.hpp"
#include "stagger/model_io.hpp"
#include "stagger/synthetic.hpp"
#include "stagger/training.hpp"

using namespace stagger;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("stagger_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Model trained(Variant v) {
  ModelConfig c;
  c.variant = v;
  c.word_dim = 5;
  c.char_dim = 3;
  c.hidden = 4;
  c.epochs = 1;
  auto data = generate_synthetic({20, 5, 0.1, 3}).data;
  return train(c, data, {}).final_model;
}

}  // namespace

TEST_CASE("model files round trip") {
  for (Variant v : {Variant::BiLstm, Variant::BiLstmCrfAttn}) {
    Model m = trained(v);
    std::stringstream buf;
    TrainingMeta meta{7, 1, 1, "final"};
    write_model(buf, m, meta);
    const std::string bytes = buf.str();
    std::istringstream in(bytes);
    LoadedModel back = read_model(in);
    CHECK(back.meta == meta);
    CHECK(back.model.config() == m.config());
    CHECK(back.model.vocab() == m.vocab());
    auto a = std::as_const(m).params();
    auto b = std::as_const(back.model).params();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i]->name == b[i]->name);
      CHECK(a[i]->value == b[i]->value);
    }
    std::stringstream again;
    write_model(again, back.model, back.meta);
    CHECK(again.str() == bytes);

    TokenSequence title = tokenize("Woodland Imports Decorative Bottle");
    CHECK(predict(m, title) == predict(back.model, title));
  }
}

TEST_CASE("corrupt model files are refused") {
  Model m = trained(Variant::BiLstmCrf);
  std::stringstream buf;
  write_model(buf, m, {});
  const std::string bytes = buf.str();

  std::string wrong_version = bytes;
  wrong_version.replace(wrong_version.find("version 1"), 9, "version 9");
  std::istringstream v(wrong_version);
  CHECK_THROWS_AS(read_model(v), DataError);

  std::istringstream cut(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_model(cut), DataError);

  std::istringstream extra(bytes + "x");
  CHECK_THROWS_AS(read_model(extra), DataError);

  std::istringstream junk("not a model\n");
  CHECK_THROWS_AS(read_model(junk), DataError);

  CHECK_THROWS_AS(load_model("/nonexistent/model.stg"), DataError);
}

TEST_CASE("cli train, tag and eval") {
  TempDir dir;
  const std::string data = dir.file("brands.conll"), model = dir.file("model.stg"),
                    titles = dir.file("titles.txt");
  REQUIRE(cli({"synth", "--out", data, "--titles", "60", "--brands", "8", "--seed", "2"}).code == 0);

  const std::vector<std::string> train_args{"train", "--data", data, "--variant", "bilstm-crf",
                                            "--seed", "7", "--out", model, "--epochs", "2",
                                            "--hidden", "4", "--word-dim", "6", "--char-dim", "3"};
  Run t = cli(train_args);
  CHECK(t.code == 0);
  CHECK(fs::exists(model));
  CHECK(t.out.find("epoch\tmean_loss") != std::string::npos);
  CHECK(t.out.find("(test)") != std::string::npos);

  std::ofstream(titles) << "Woodland Imports Decorative Bottle\n\nBlanket\n";
  Run g1 = cli({"tag", "--model", model, "--data", titles});
  Run g2 = cli({"tag", "--model", model, "--data", titles});
  CHECK(g1.code == 0);
  CHECK(g1.out == g2.out);
  CHECK(g1.out.rfind("Woodland Imports Decorative Bottle\t", 0) == 0);
  CHECK(std::count(g1.out.begin(), g1.out.end(), '\n') == 2);
  CHECK(g1.err.find("skipped 1") != std::string::npos);

  Run e = cli({"eval", "--model", model, "--data", data, "--tsv"});
  CHECK(e.code == 0);
  CHECK(std::count(e.out.begin(), e.out.end(), '\t') == 4);
}

TEST_CASE("cli determinism") {
  TempDir dir;
  const std::string data = dir.file("d.conll");
  REQUIRE(cli({"synth", "--out", data, "--titles", "40", "--brands", "6"}).code == 0);
  auto run = [&](const std::string& out) {
    return cli({"train", "--data", data, "--out", out, "--epochs", "2", "--hidden", "3",
                "--word-dim", "4", "--char-dim", "2", "--seed", "11", "--variant", "bilstm-crf-attn",
                "--log", dir.file("log.tsv")});
  };
  REQUIRE(run(dir.file("a.stg")).code == 0);
  REQUIRE(run(dir.file("b.stg")).code == 0);
  CHECK(slurp(dir.file("a.stg")) == slurp(dir.file("b.stg")));
}

TEST_CASE("cli exit codes") {
  TempDir dir;
  const std::string data = dir.file("d.conll");
  REQUIRE(cli({"synth", "--out", data, "--titles", "20"}).code == 0);

  Run bad_dropout = cli({"train", "--data", data, "--out", dir.file("m"), "--dropout", "1.5"});
  CHECK(bad_dropout.code == kExitUsage);
  CHECK_FALSE(fs::exists(dir.file("m")));

  Run missing = cli({"train", "--data", dir.file("nope.conll"), "--out", dir.file("m")});
  CHECK(missing.code == kExitData);
  CHECK(missing.err.find("nope.conll") != std::string::npos);

  std::ofstream(dir.file("broken.conll")) << "a\tO\nb\n";
  Run broken = cli({"train", "--data", dir.file("broken.conll"), "--out", dir.file("m")});
  CHECK(broken.code == kExitData);
  CHECK(broken.err.find(":2") != std::string::npos);

  CHECK(cli({"train", "--variant", "nope", "--data", data, "--out", dir.file("m")}).code ==
        kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"tag", "--model", dir.file("missing.stg"), "--data", data}).code == kExitData);
  CHECK(cli({"--help"}).code == kExitOk);

  Run good = cli({"selfcheck", "--trials", "20", "--grad-seeds", "1"});
  CHECK(good.code == kExitOk);
  Run bad = cli({"selfcheck", "--trials", "5", "--grad-seeds", "1", "--perturb-gradients"});
  CHECK(bad.code == kExitSelfcheck);
  CHECK(bad.out.find("FAIL gradient") != std::string::npos);
  CHECK(bad.out.find("instance:") != std::string::npos);
}

TEST_CASE("cli config file") {
  TempDir dir;
  const std::string data = dir.file("d.conll");
  REQUIRE(cli({"synth", "--out", data, "--titles", "20"}).code == 0);
  std::ofstream(dir.file("run.ini")) << "# quick run\nepochs=1\nhidden=3\nword-dim=4\nchar-dim=2\nvariant=bilstm\n";
  Run r = cli({"train", "--config", dir.file("run.ini"), "--data", data, "--out", dir.file("m.stg"),
               "--save", "final", "--hidden", "2"});
  CHECK(r.code == 0);
  LoadedModel m = load_model(dir.file("m.stg"));
  CHECK(m.model.config().hidden == 2);  // the flag wins
  CHECK(m.model.config().word_dim == 4);
  CHECK(m.model.config().variant == Variant::BiLstm);
  CHECK(m.meta.snapshot == "final");
  CHECK(m.meta.epochs_completed == 1);

  std::ofstream(dir.file("bad.ini")) << "epochs\n";
  CHECK(cli({"train", "--config", dir.file("bad.ini"), "--data", data, "--out", dir.file("x")}).code ==
        kExitUsage);
  std::ofstream(dir.file("unknown.ini")) << "colour=blue\n";
  CHECK(cli({"train", "--config", dir.file("unknown.ini"), "--data", data, "--out", dir.file("x")})
            .code == kExitUsage);
  std::ofstream(dir.file("flags.ini")) << "lowercase=true\nepochs=1\nhidden=2\nword-dim=2\nchar-dim=2\n";
  REQUIRE(cli({"train", "--config", dir.file("flags.ini"), "--data", data, "--out", dir.file("f.stg")})
              .code == 0);
  CHECK(load_model(dir.file("f.stg")).model.config().lowercase);
}
