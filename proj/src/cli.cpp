#include "scamo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "scamo/core.hpp"
#include "scamo/flops.hpp"
#include "scamo/fsq.hpp"
#include "scamo/json_text.hpp"
#include "scamo/planner.hpp"
#include "scamo/scaling.hpp"
#include "scamo/seqmodel.hpp"
#include "scamo/synth.hpp"
#include "scamo/vq.hpp"

namespace scamo::cli {
namespace {

constexpr std::uint64_t kDefaultSeed = 42;

std::string read_all(const std::string& path, std::istream& in) {
    std::ostringstream s;
    if (path.empty() || path == "-") {
        s << in.rdbuf();
        return s.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open " + path);
    s << f.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::invalid_argument("cannot write " + path);
    f << content;
    if (!f.flush()) throw std::invalid_argument("failed writing " + path);
}

std::string pretty(const ordered_json& j) { return format_json(j, 2) + "\n"; }

// Comma-separated numeric rows. A first line that does not parse as numbers
// is taken as a header.
std::vector<std::vector<double>> read_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        bool ok = true;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
            if (end == cell.c_str() || (end && *end != '\0')) {
                ok = false;
                break;
            }
            row.push_back(v);
        }
        if (!ok) {
            if (first) {
                first = false;
                continue;
            }
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": non-numeric cell");
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": ragged row");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ScalingFits load_fits(const std::string& arg, std::istream& in, const FitsPreset** preset_out = nullptr) {
    if (const auto* preset = find_fits_preset(arg)) {
        if (preset_out) *preset_out = preset;
        return preset->fits;
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_all(arg, in));
    } catch (const nlohmann::json::parse_error&) {
        throw std::invalid_argument("fits file " + arg + " is not valid JSON");
    }
    return scaling_fits_from_json(doc);
}

std::vector<RunRecord> load_runs_from(const std::string& path, std::istream& in) {
    std::istringstream s(read_all(path, in));
    return load_runs(s);
}

// A flat JSON array is one item; an array of arrays is a batch.
std::pair<bool, std::vector<nlohmann::json>> split_batch(const nlohmann::json& doc) {
    if (!doc.is_array()) throw std::invalid_argument("fsq input must be a JSON array");
    if (!doc.empty() && doc.front().is_array()) return {true, std::vector<nlohmann::json>(doc.begin(), doc.end())};
    return {false, {doc}};
}

std::vector<double> as_doubles(const nlohmann::json& a) {
    std::vector<double> v;
    for (const auto& x : a) {
        if (!x.is_number()) throw std::invalid_argument("expected a numeric array");
        v.push_back(x.get<double>());
    }
    return v;
}

FsqCode as_code(const nlohmann::json& a) {
    FsqCode c;
    for (const auto& x : a) {
        if (!x.is_number_integer()) throw std::invalid_argument("FSQ codes must be integer arrays");
        c.q.push_back(x.get<int>());
    }
    return c;
}

std::string run_fsq(const std::string& mode, const std::string& levels_arg, const std::string& input,
                    std::istream& in) {
    const FsqLevels levels = parse_fsq_levels(levels_arg);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_all(input, in));
    } catch (const nlohmann::json::parse_error&) {
        throw std::invalid_argument("fsq input is not valid JSON");
    }

    if (mode == "decode") {
        auto decode_one = [&](const nlohmann::json& x) {
            if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<std::int64_t>() >= 0)) {
                throw std::invalid_argument("FSQ indices must be non-negative integers");
            }
            return ordered_json(fsq_decode_index(x.get<std::uint64_t>(), levels).q);
        };
        if (doc.is_array()) {
            ordered_json out = ordered_json::array();
            for (const auto& x : doc) out.push_back(decode_one(x));
            return format_json(out) + "\n";
        }
        return format_json(decode_one(doc)) + "\n";
    }

    auto [batched, items] = split_batch(doc);
    ordered_json out = ordered_json::array();
    for (const auto& item : items) {
        if (mode == "quantize") {
            out.push_back(fsq_quantize(as_doubles(item), levels).q);
        } else if (mode == "dequantize") {
            out.push_back(fsq_dequantize(as_code(item), levels));
        } else {
            out.push_back(fsq_encode_index(as_code(item), levels));
        }
    }
    return format_json(batched ? out : out.front()) + "\n";
}

std::string run_vq(const std::string& latents_path, const std::string& codebook_path, double alpha,
                   std::istream& in) {
    const auto latents = read_csv(read_all(latents_path, in));
    if (latents.empty()) throw std::invalid_argument("no latents");
    const auto cb = VqCodebook::from_entries(read_csv(read_all(codebook_path, in)));

    CodeUsageHistogram hist(cb.size());
    double commit = 0.0;
    for (const auto& z : latents) {
        const auto a = vq_quantize(z, cb);
        hist.observe(a.index);
        commit += commitment_loss(z, a.entry, alpha);
    }
    const auto m = codebook_metrics(hist);

    ordered_json j;
    j["codebook_size"] = cb.size();
    j["n_latents"] = latents.size();
    j["histogram"] = std::vector<std::uint64_t>(hist.counts().begin(), hist.counts().end());
    j["utilization"] = m.utilization;
    j["shannon_entropy_nats"] = m.shannon_entropy_nats;
    j["exp_entropy"] = m.exp_entropy;
    j["mean_commitment_loss"] = commit / static_cast<double>(latents.size());
    return pretty(j);
}

std::string run_normloss(const std::string& input, std::istream& in) {
    std::vector<TokenProbRecord> records;
    for (const auto& row : read_csv(read_all(input, in))) {
        if (row.size() != 2) throw std::invalid_argument("normloss CSV needs two columns: model_logp, baseline_logp");
        records.push_back({row[0], row[1]});
    }
    const auto ce = ce_loss(records);
    ordered_json j;
    j["sum_ce"] = ce.sum_nats;
    j["mean_ce"] = ce.mean_nats;
    j["normalized_loss"] = normalized_loss(records);
    return pretty(j);
}

std::string frontier_csv(const std::vector<FrontierPoint>& frontier) {
    std::string s = "flops,n_nv,n_v,d_tokens,loss\n";
    for (const auto& p : frontier) {
        s += format_double(*p.run.flops) + "," + format_double(p.n_nv) + "," + format_double(p.n_v) + "," +
             format_double(p.d_tokens) + "," + format_double(p.loss) + "\n";
    }
    return s;
}

std::uint64_t seed_from_env() {
    const char* env = std::getenv("SCAMO_LAB_SEED");
    if (!env || !*env) return kDefaultSeed;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw std::invalid_argument("SCAMO_LAB_SEED must be an unsigned integer");
    return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"scamo-lab: compute-scaling laboratory for quantized motion-token transformers", "scamo-lab"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_path;
    app.add_option("--out", out_path, "Write results here instead of stdout");

    // flops
    auto* flops_cmd = app.add_subcommand("flops", "Exact forward FLOPs per token");
    ModelConfig mc;
    flops_cmd->add_option("--layers", mc.n_layers)->required();
    flops_cmd->add_option("--heads", mc.n_heads)->required();
    flops_cmd->add_option("--d-model", mc.d_model)->required();
    flops_cmd->add_option("--ctx", mc.n_ctx)->required();
    flops_cmd->add_option("--vocab", mc.n_vocab)->required();
    flops_cmd->add_option("--ff-ratio", mc.ff_ratio)->capture_default_str();

    // fsq
    auto* fsq_cmd = app.add_subcommand("fsq", "FSQ quantize/dequantize/encode/decode on JSON arrays");
    std::string fsq_mode, fsq_levels, fsq_in = "-";
    fsq_cmd->add_option("mode", fsq_mode)->required()->check(CLI::IsMember({"quantize", "dequantize", "encode", "decode"}));
    fsq_cmd->add_option("--levels", fsq_levels, "Preset (2^4 .. 2^16) or list like 8,5,5,5")->required();
    fsq_cmd->add_option("--in", fsq_in, "JSON input (default stdin)");

    // vq
    auto* vq_cmd = app.add_subcommand("vq", "Nearest-neighbor assignment histogram and codebook metrics");
    std::string vq_latents, vq_codebook;
    double vq_alpha = VqTrainParams{}.alpha;
    vq_cmd->add_option("--latents", vq_latents, "CSV, one latent per row")->required();
    vq_cmd->add_option("--codebook", vq_codebook, "CSV, one entry per row")->required();
    vq_cmd->add_option("--alpha", vq_alpha, "Commitment weight")->capture_default_str();

    // normloss
    auto* norm_cmd = app.add_subcommand("normloss", "Cross-entropy and normalized loss from log-probabilities");
    std::string norm_in = "-";
    norm_cmd->add_option("--in", norm_in, "CSV of model_logp,baseline_logp");

    // ingest / frontier / fit
    auto* ingest_cmd = app.add_subcommand("ingest", "Validate a run log and fill missing flops");
    std::string runs_in = "-";
    double bin_width = kDefaultBinWidthLog10;
    std::string csv_path;
    ingest_cmd->add_option("--in", runs_in, "Run log JSONL (default stdin)");

    auto* frontier_cmd = app.add_subcommand("frontier", "Minimum-loss run per isoFLOPs bucket");
    frontier_cmd->add_option("--in", runs_in, "Run log JSONL (default stdin)");
    frontier_cmd->add_option("--bin-width", bin_width, "Bucket width in decades")->capture_default_str();
    frontier_cmd->add_option("--csv", csv_path, "Also write flops,n_nv,n_v,d_tokens,loss CSV here");

    auto* fit_cmd = app.add_subcommand("fit", "Fit scaling laws on the isoFLOPs frontier");
    fit_cmd->add_option("--in", runs_in, "Run log JSONL (default stdin)");
    fit_cmd->add_option("--bin-width", bin_width, "Bucket width in decades")->capture_default_str();

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "Optimal allocation for a compute budget");
    double plan_flops = 0.0;
    std::string plan_fits = "scamo-paper";
    std::int64_t plan_d_model = 0;
    bool rescale_d = false;
    std::optional<double> plan_n_nv;
    plan_cmd->add_option("--flops", plan_flops, "Compute budget C")->required();
    plan_cmd->add_option("--fits", plan_fits, "Fits JSON path or preset name")->capture_default_str();
    plan_cmd->add_option("--d-model", plan_d_model, "Hidden size used to turn N_v into a vocabulary")->required();
    plan_cmd->add_flag("--rescale-d", rescale_d, "Rescale D so 6(N_nv + N_v)D = C");
    plan_cmd->add_option("--n-nv", plan_n_nv, "Also predict the vocabulary deserved by this model size");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Synthetic run log sampled from known laws");
    SynthSpec spec;
    std::string synth_laws = "scamo-paper";
    std::optional<std::uint64_t> synth_seed;
    synth_cmd->add_option("--laws", synth_laws, "Fits JSON path or preset name")->capture_default_str();
    synth_cmd->add_option("--grid-min", spec.c_grid_log10.min, "log10 of the smallest budget")->capture_default_str();
    synth_cmd->add_option("--grid-max", spec.c_grid_log10.max, "log10 of the largest budget")->capture_default_str();
    synth_cmd->add_option("--points", spec.c_grid_log10.n_points, "Budgets on the grid")->capture_default_str();
    synth_cmd->add_option("--runs-per-budget", spec.runs_per_budget)->capture_default_str();
    synth_cmd->add_option("--noise", spec.noise_sigma_log10, "Noise sigma (log10 units)")->capture_default_str();
    synth_cmd->add_option("--seed", synth_seed, "Overrides SCAMO_LAB_SEED (default 42)");
    synth_cmd->add_option("--n-ctx", spec.n_ctx)->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "scamo-lab: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    std::string result;
    std::string csv_content;
    try {
        if (flops_cmd->parsed()) {
            const auto b = flops_per_token_exact(mc);
            ordered_json j;
            j["embeddings"] = b.embeddings;
            j["attn_qkv"] = b.attn_qkv;
            j["attn_mask"] = b.attn_mask;
            j["attn_project"] = b.attn_project;
            j["ff"] = b.ff;
            j["logits"] = b.logits;
            j["total"] = b.total;
            result = pretty(j);
        } else if (fsq_cmd->parsed()) {
            result = run_fsq(fsq_mode, fsq_levels, fsq_in, in);
        } else if (vq_cmd->parsed()) {
            result = run_vq(vq_latents, vq_codebook, vq_alpha, in);
        } else if (norm_cmd->parsed()) {
            result = run_normloss(norm_in, in);
        } else if (ingest_cmd->parsed()) {
            std::ostringstream s;
            write_runs(s, load_runs_from(runs_in, in));
            result = s.str();
        } else if (frontier_cmd->parsed()) {
            const auto runs = load_runs_from(runs_in, in);
            const auto frontier = pareto_frontier(runs, bin_width);
            ordered_json j = ordered_json::array();
            for (const auto& p : frontier) j.push_back(to_json(p));
            result = pretty(j);
            if (!csv_path.empty()) csv_content = frontier_csv(frontier);
        } else if (fit_cmd->parsed()) {
            const auto runs = load_runs_from(runs_in, in);
            result = pretty(to_json(fit_all(pareto_frontier(runs, bin_width))));
        } else if (plan_cmd->parsed()) {
            const FitsPreset* preset = nullptr;
            const auto fits = load_fits(plan_fits, in, &preset);
            const auto plan = plan_budget(plan_flops, fits, plan_d_model, {rescale_d});
            ordered_json j = to_json(plan);
            j["scale_faster"] = to_json(scale_faster_report(fits));
            if (preset && preset->reference &&
                std::abs(plan_flops / preset->reference->flops_budget - 1.0) < 1e-12) {
                j["reference_check"] = to_json(compare_to_reference(plan, *preset->reference));
            }
            if (plan_n_nv) j["vocab_for_model"] = to_json(vocab_for_model(*plan_n_nv, fits.nv_vs_nnv, plan_d_model));
            result = pretty(j);
        } else if (synth_cmd->parsed()) {
            spec.laws = load_fits(synth_laws, in);
            spec.seed = synth_seed ? *synth_seed : seed_from_env();
            std::ostringstream s;
            write_runs(s, synth_runs(spec));
            result = s.str();
        }

        if (!csv_path.empty() && frontier_cmd->parsed()) write_file(csv_path, csv_content);
        if (out_path.empty()) {
            out << result;
        } else {
            write_file(out_path, result);
        }
    } catch (const RunLogError& e) {
        err << "scamo-lab: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "scamo-lab: error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace scamo::cli
