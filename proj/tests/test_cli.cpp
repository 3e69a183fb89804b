#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scamo/cli.hpp"
#include "scamo/core.hpp"
#include "scamo/json_text.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = scamo::cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content) {
    const auto p = fs::temp_directory_path() / ("scamo_cli_test_" + name);
    std::ofstream(p) << content;
    return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli({}).code == scamo::cli::kExitUsage);
    CHECK(run_cli({"bogus"}).code == scamo::cli::kExitUsage);
    CHECK(run_cli({"flops", "--layers", "2"}).code == scamo::cli::kExitUsage);
    CHECK(run_cli({"flops", "--layers", "x", "--heads", "1", "--d-model", "8", "--ctx", "4", "--vocab", "4"}).code ==
          scamo::cli::kExitUsage);
    const auto help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("plan") != std::string::npos);
}

TEST_CASE("flops subcommand") {
    const auto r = run_cli({"flops", "--layers", "8", "--heads", "8", "--d-model", "512", "--ctx", "1024", "--vocab",
                            "65536"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["total"] == 125831168);
    CHECK(j["logits"] == 67108864);
    CHECK(r.out.find("\"embeddings\"") < r.out.find("\"total\""));

    const auto bad = run_cli({"flops", "--layers", "1", "--heads", "3", "--d-model", "8", "--ctx", "4", "--vocab", "4"});
    CHECK(bad.code == scamo::cli::kExitValidation);
    CHECK(bad.err.find("divisible") != std::string::npos);
}

TEST_CASE("plan for 1e18 with the published laws") {
    const auto r = run_cli({"plan", "--flops", "1e18", "--d-model", "3200", "--n-nv", "3e9"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["predicted_loss"].get<double>() + 5.277) < 1e-3);
    CHECK(j["vocab_pow2"] == 65536);
    CHECK(std::abs(std::log10(j["n_nv"].get<double>()) - 9.74) < 0.01);
    CHECK(std::abs(std::log10(j["d_tokens"].get<double>()) - 7.69) < 0.01);
    CHECK(j["reference_check"]["all_agree"] == true);
    CHECK(j["scale_faster"]["verdicts"] == nlohmann::json::parse("[true,true]"));
    CHECK(j["vocab_for_model"]["vocab_pow2"] == 65536);

    const auto other = nlohmann::json::parse(run_cli({"plan", "--flops", "1e17", "--d-model", "3200"}).out);
    CHECK(!other.contains("reference_check"));

    CHECK(run_cli({"plan", "--flops", "-1", "--d-model", "3200"}).code == scamo::cli::kExitValidation);
    CHECK(run_cli({"plan", "--flops", "1e18", "--d-model", "3200", "--fits", "/nonexistent/fits.json"}).code ==
          scamo::cli::kExitValidation);
}

TEST_CASE("synth piped into fit recovers the exponents") {
    const auto s = run_cli({"synth", "--seed", "42"});
    REQUIRE(s.code == 0);
    const auto f = run_cli({"fit"}, s.out);
    REQUIRE(f.code == 0);
    const auto j = nlohmann::json::parse(f.out);
    CHECK(std::abs(j["nv_vs_c"]["exponent"].get<double>() - 0.75) < 1e-9);
    CHECK(std::abs(j["nnv_vs_c"]["exponent"].get<double>() - 0.57) < 1e-9);
    CHECK(std::abs(j["d_vs_c"]["exponent"].get<double>() - 0.43) < 1e-9);

    // Fits written by `fit` are accepted by `plan --fits`.
    const auto fits = temp_file("fits.json", f.out);
    const auto p = run_cli({"plan", "--flops", "1e18", "--d-model", "3200", "--fits", fits.string()});
    CHECK(p.code == 0);
    fs::remove(fits);
}

TEST_CASE("synth seed comes from the flag, then the environment") {
    const auto a = run_cli({"synth", "--noise", "0.05", "--seed", "7"}).out;
    const auto b = run_cli({"synth", "--noise", "0.05", "--seed", "7"}).out;
    CHECK(a == b);
    ::setenv("SCAMO_LAB_SEED", "7", 1);
    CHECK(run_cli({"synth", "--noise", "0.05"}).out == a);
    ::setenv("SCAMO_LAB_SEED", "seven", 1);
    CHECK(run_cli({"synth", "--noise", "0.05"}).code == scamo::cli::kExitValidation);
    ::unsetenv("SCAMO_LAB_SEED");
    CHECK(run_cli({"synth", "--noise", "0.05"}).out == run_cli({"synth", "--noise", "0.05", "--seed", "42"}).out);
}

TEST_CASE("frontier writes JSON and CSV") {
    const auto runs = run_cli({"synth"}).out;
    const auto csv = fs::temp_directory_path() / "scamo_cli_test_frontier.csv";
    fs::remove(csv);
    const auto r = run_cli({"frontier", "--csv", csv.string()}, runs);
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).size() == 6);
    std::ifstream f(csv);
    std::string header;
    std::getline(f, header);
    CHECK(header == "flops,n_nv,n_v,d_tokens,loss");
    int lines = 0;
    for (std::string l; std::getline(f, l);) ++lines;
    CHECK(lines == 6);
    fs::remove(csv);
}

TEST_CASE("fsq subcommand modes") {
    CHECK(run_cli({"fsq", "quantize", "--levels", "5"}, "[0.0]").out == "[3]\n");
    CHECK(run_cli({"fsq", "quantize", "--levels", "5,3"}, "[[20,-20],[0,0]]").out == "[[5,1],[3,2]]\n");
    CHECK(run_cli({"fsq", "dequantize", "--levels", "5"}, "[3]").out == "[0.5]\n");
    CHECK(run_cli({"fsq", "encode", "--levels", "5,3"}, "[5,3]").out == "14\n");
    CHECK(run_cli({"fsq", "decode", "--levels", "5,3"}, "[0,14]").out == "[[1,1],[5,3]]\n");
    CHECK(run_cli({"fsq", "decode", "--levels", "5,3"}, "[15]").code == scamo::cli::kExitValidation);
    CHECK(run_cli({"fsq", "quantize", "--levels", "5"}, "not json").code == scamo::cli::kExitValidation);
    CHECK(run_cli({"fsq", "scramble", "--levels", "5"}, "[0]").code == scamo::cli::kExitUsage);
}

TEST_CASE("normloss subcommand") {
    const std::string csv = "model_logp,baseline_logp\n-0.6931471805599453,-0.6931471805599453\n"
                            "-1.3862943611198906,-0.6931471805599453\n";
    const auto r = run_cli({"normloss"}, csv);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["normalized_loss"].get<double>() - 0.34657359) < 1e-8);
    CHECK(run_cli({"normloss"}, "0.5,-1\n").code == scamo::cli::kExitValidation);
    CHECK(run_cli({"normloss"}, "-1,-1\n-1,x\n").code == scamo::cli::kExitValidation);
}

TEST_CASE("vq subcommand") {
    const auto lat = temp_file("latents.csv", "0.9,0.8\n0.1,0.0\n0.2,0.1\n");
    const auto cb = temp_file("codebook.csv", "0,0\n1,1\n5,5\n");
    const auto r = run_cli({"vq", "--latents", lat.string(), "--codebook", cb.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["histogram"] == nlohmann::json::parse("[2,1,0]"));
    CHECK(std::abs(j["utilization"].get<double>() - 2.0 / 3) < 1e-15);
    const auto bad = temp_file("bad_codebook.csv", "0,0,0\n");
    CHECK(run_cli({"vq", "--latents", lat.string(), "--codebook", bad.string()}).code == scamo::cli::kExitValidation);
    fs::remove(lat);
    fs::remove(cb);
    fs::remove(bad);
}

TEST_CASE("ingest reports bad lines and writes nothing on failure") {
    const std::string good =
        R"({"run_id":"a","n_layers":1,"n_heads":1,"d_model":8,"n_ctx":4,"vocab_size":4,"tokens_trained":100,"normalized_loss":0.5})"
        "\n";
    const auto ok = run_cli({"ingest"}, good);
    REQUIRE(ok.code == 0);
    CHECK(ok.out.find("\"flops\"") != std::string::npos);

    const auto out = fs::temp_directory_path() / "scamo_cli_test_ingest.jsonl";
    fs::remove(out);
    const auto bad = run_cli({"--out", out.string(), "ingest"}, good + "{\"run_id\":\"b\"}\nnot json\n");
    CHECK(bad.code == scamo::cli::kExitValidation);
    CHECK(bad.err.find("line 2") != std::string::npos);
    CHECK(bad.err.find("line 3") != std::string::npos);
    CHECK(!fs::exists(out));

    CHECK(run_cli({"--out", out.string(), "ingest"}, good).code == 0);
    std::ifstream f(out);
    std::stringstream s;
    s << f.rdbuf();
    CHECK(s.str() == ok.out);
    fs::remove(out);
}

}
