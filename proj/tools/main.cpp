// termlab command line: train / generate / eval / verify.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "termlab/eval/metrics.hpp"
#include "termlab/io/checkpoint.hpp"
#include "termlab/verify/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace termlab;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path default_out_dir() {
    if (const char* env = std::getenv("TERMLAB_OUT_DIR")) return fs::path(env);
    return fs::path(".");
}

std::vector<std::int64_t> parse_thresholds(const std::string& text) {
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(std::stoll(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (out.empty()) throw UsageError("no thresholds given");
    return out;
}

std::vector<decode::DecoderSpec> parse_spec_list(const std::string& text, std::int64_t cap,
                                                 std::uint64_t seed) {
    std::vector<decode::DecoderSpec> specs;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        decode::DecoderSpec spec = decode::parse_decoder_spec(text.substr(pos, comma - pos));
        spec.cap = cap;
        spec.seed = seed;
        specs.push_back(spec);
        pos = comma + 1;
    }
    if (specs.empty()) throw UsageError("no decoder specs given");
    return specs;
}

// ---- train ----

struct TrainArgs {
    std::string corpus;
    std::string val_corpus;
    std::string tokenizer = "char";
    std::string head = "va";
    double eps = -1.0;
    std::string cell = "rnn";
    int layers = 1;
    int hidden = 64;
    bool untied = false;
    double lr = 1e-3;
    double dropout = 0.0;
    double weight_decay = 0.01;
    int batch = 32;
    int epochs = 70;
    int patience = 10;
    int context_len = 10;
    std::size_t min_freq = 1;
    bool no_unk = false;
    double train_frac = 0.8, val_frac = 0.1, test_frac = 0.1;
    std::uint64_t seed = 12345;
    std::string out_dir;
};

int cmd_train(const TrainArgs& args) {
    heads::HeadKind head = heads::parse_head_kind(args.head);
    if (head == heads::HeadKind::va && args.eps >= 0.0)
        throw UsageError("--eps is meaningless for the va head");
    if (head != heads::HeadKind::va && args.eps < 0.0)
        throw UsageError("--eps is required for st/nmst heads");

    TokenizerMode mode = parse_tokenizer_mode(args.tokenizer);
    auto lines = read_corpus(args.corpus, mode);

    std::vector<std::vector<std::string>> train_lines, val_lines;
    if (!args.val_corpus.empty()) {
        train_lines = std::move(lines);
        val_lines = read_corpus(args.val_corpus, mode);
    } else {
        net::CorpusSplit split = net::split_corpus(std::move(lines), args.train_frac,
                                                   args.val_frac, args.test_frac, args.seed);
        train_lines = std::move(split.train);
        val_lines = std::move(split.val);
    }

    Vocabulary vocab = build_vocabulary(train_lines, args.min_freq, !args.no_unk);

    net::Architecture arch;
    arch.cell = net::parse_cell_kind(args.cell);
    arch.layers = args.layers;
    arch.hidden = args.hidden;
    arch.embedding = args.hidden;
    arch.tied = !args.untied;
    arch.head = head;
    arch.epsilon = head == heads::HeadKind::va ? 0.0 : args.eps;

    net::TrainConfig cfg;
    cfg.learning_rate = args.lr;
    cfg.weight_decay = args.weight_decay;
    cfg.batch_size = args.batch;
    cfg.max_epochs = args.epochs;
    cfg.patience = args.patience;
    cfg.dropout = args.dropout;
    cfg.seed = args.seed;
    cfg.context_length = args.context_len;

    auto train_set = net::make_examples(train_lines, vocab, cfg.context_length);
    auto val_set = net::make_examples(val_lines, vocab, cfg.context_length);
    if (train_set.empty() || val_set.empty())
        throw UsageError("no usable lines after the context split; lower --context-len");

    net::TrainResult result = net::train(vocab, arch, train_set, val_set, cfg);

    fs::path out_dir = args.out_dir.empty() ? default_out_dir() : fs::path(args.out_dir);
    fs::create_directories(out_dir);
    io::CheckpointMeta meta{to_string(mode), cfg.context_length};
    fs::path ckpt_path = out_dir / "checkpoint.tlck";
    io::save_checkpoint(ckpt_path, result.params, meta);

    json metrics;
    metrics["best_epoch"] = result.best_epoch;
    metrics["best_val_perplexity"] = result.best_val_perplexity;
    metrics["seed"] = args.seed;
    metrics["epochs"] = json::array();
    for (const auto& epoch : result.history)
        metrics["epochs"].push_back({{"epoch", epoch.epoch},
                                     {"train_nll_per_token", epoch.train_nll_per_token},
                                     {"val_perplexity", epoch.val_perplexity},
                                     {"learning_rate", epoch.learning_rate}});
    fs::path metrics_path = out_dir / "train_metrics.json";
    std::ofstream mf(metrics_path);
    mf << metrics.dump(2) << '\n';

    std::cout << "wrote " << ckpt_path.string() << " (best epoch " << result.best_epoch
              << ", val ppl " << result.best_val_perplexity << ")\n";
    return 0;
}

// ---- generate ----

int cmd_generate(const std::string& ckpt_path, const std::string& contexts_path,
                 const std::string& spec_text, std::int64_t cap, std::uint64_t seed,
                 const std::string& out_path) {
    io::LoadedCheckpoint loaded = io::load_checkpoint(ckpt_path);
    net::RecurrentModel model(loaded.params);
    TokenizerMode mode = parse_tokenizer_mode(loaded.meta.tokenizer);

    auto lines = read_corpus(contexts_path, mode);
    std::vector<Context> contexts;
    for (const auto& line : lines) {
        Sequence s = encode(loaded.params.vocab(), line, /*append_eos=*/false);
        contexts.push_back(Context::from_ids(std::move(s.ids), loaded.params.vocab().eos_id()));
    }
    if (contexts.empty()) throw UsageError("contexts file is empty");

    decode::DecoderSpec spec = decode::parse_decoder_spec(spec_text);
    spec.cap = cap;

    eval::CampaignOptions options;
    options.master_seed = seed;
    options.thresholds = {};
    options.model_id = ckpt_path;
    eval::CampaignResult campaign = eval::run_campaign(model, contexts, {spec}, options);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open output file: " + out_path);
        out = &file;
    }
    for (const auto& rec : campaign.reports[0].records)
        *out << eval::record_to_json_line(rec, spec_text, loaded.params.vocab()) << '\n';
    return 0;
}

// ---- eval ----

int cmd_eval(const std::string& ckpt_path, const std::string& corpus_path,
             const std::string& specs_text, const std::string& thresholds_text, std::int64_t cap,
             int context_len, std::uint64_t seed, const std::string& out_path,
             const std::string& csv_path) {
    io::LoadedCheckpoint loaded = io::load_checkpoint(ckpt_path);
    net::RecurrentModel model(loaded.params);
    TokenizerMode mode = parse_tokenizer_mode(loaded.meta.tokenizer);

    auto lines = read_corpus(corpus_path, mode);
    int c = context_len >= 0 ? context_len : loaded.meta.context_length;
    auto examples = net::make_examples(lines, loaded.params.vocab(), c);
    if (examples.empty()) throw UsageError("no usable lines after the context split");

    auto thresholds = parse_thresholds(thresholds_text);
    if (cap < 0) cap = *std::max_element(thresholds.begin(), thresholds.end());
    for (std::int64_t threshold : thresholds)
        if (threshold > cap) throw UsageError("threshold exceeds --cap");

    std::vector<Context> contexts;
    contexts.reserve(examples.size());
    for (const auto& [ctx, target] : examples) contexts.push_back(ctx);

    eval::CampaignOptions options;
    options.master_seed = seed;
    options.thresholds = thresholds;
    options.model_id = ckpt_path;
    eval::CampaignResult campaign =
        eval::run_campaign(model, contexts, parse_spec_list(specs_text, cap, seed), options);
    campaign.metrics.perplexity = eval::perplexity(model, examples);

    std::string text = eval::metrics_to_json(campaign.metrics);
    if (out_path.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << text << '\n';
        std::cout << "wrote " << out_path << '\n';
    }
    if (!csv_path.empty()) eval::write_rnt_csv(campaign.metrics, csv_path);
    return 0;
}

// ---- verify ----

int cmd_verify(const std::string& suite, std::uint64_t seed, int trials,
               const std::string& out_path) {
    std::vector<verify::SuiteResult> results;
    try {
        results = verify::run_suite(suite, seed, trials);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    bool all_passed = true;
    json all = json::array();
    for (const verify::SuiteResult& result : results) {
        all.push_back(json::parse(verify::suite_to_json(result)));
        for (const verify::CheckResult& check : result.checks) {
            std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << result.suite << " / "
                      << check.name;
            if (!check.detail.empty()) std::cout << " — " << check.detail;
            std::cout << '\n';
            all_passed = all_passed && check.pass;
        }
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << all.dump(2) << '\n';
    }
    return all_passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"termlab: termination lab for autoregressive sequence models"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "train a model and write a checkpoint");
    train->add_option("--corpus", train_args.corpus, "training corpus (one sequence per line)")
        ->required();
    train->add_option("--val", train_args.val_corpus, "separate validation corpus");
    train->add_option("--tokenizer", train_args.tokenizer, "char|word");
    train->add_option("--head", train_args.head, "va|st|nmst");
    train->add_option("--eps", train_args.eps, "epsilon for st/nmst heads");
    train->add_option("--cell", train_args.cell, "rnn|lstm");
    train->add_option("--layers", train_args.layers);
    train->add_option("--hidden", train_args.hidden);
    train->add_flag("--untied", train_args.untied, "separate output embedding");
    train->add_option("--lr", train_args.lr);
    train->add_option("--dropout", train_args.dropout);
    train->add_option("--weight-decay", train_args.weight_decay);
    train->add_option("--batch", train_args.batch);
    train->add_option("--epochs", train_args.epochs);
    train->add_option("--patience", train_args.patience);
    train->add_option("--context-len", train_args.context_len);
    train->add_option("--min-freq", train_args.min_freq);
    train->add_flag("--no-unk", train_args.no_unk, "drop rare tokens without an <unk> bucket");
    train->add_option("--split", [&train_args](CLI::results_t results) {
        return std::sscanf(results[0].c_str(), "%lf,%lf,%lf", &train_args.train_frac,
                           &train_args.val_frac, &train_args.test_frac) == 3;
    }, "train,val,test fractions (default 0.8,0.1,0.1)");
    train->add_option("--seed", train_args.seed);
    train->add_option("--out", train_args.out_dir, "output directory (default $TERMLAB_OUT_DIR)");

    std::string gen_ckpt, gen_contexts, gen_spec = "greedy", gen_out;
    std::int64_t gen_cap = 10000;
    std::uint64_t gen_seed = 12345;
    CLI::App* generate = app.add_subcommand("generate", "decode continuations for contexts");
    generate->add_option("--ckpt", gen_ckpt)->required();
    generate->add_option("--contexts", gen_contexts, "file of contexts, one per line")->required();
    generate->add_option("--spec", gen_spec, "greedy | top-k:K | nucleus:MU | beam:K");
    generate->add_option("--cap", gen_cap);
    generate->add_option("--seed", gen_seed);
    generate->add_option("--out", gen_out, "JSON-lines output file (default stdout)");

    std::string eval_ckpt, eval_corpus, eval_specs = "greedy",
                eval_thresholds = "10,100,1000,10000,100000", eval_out, eval_csv;
    std::int64_t eval_cap = -1;
    int eval_context_len = -1;
    std::uint64_t eval_seed = 12345;
    CLI::App* evaluate = app.add_subcommand("eval", "perplexity and non-termination ratios");
    evaluate->add_option("--ckpt", eval_ckpt)->required();
    evaluate->add_option("--corpus", eval_corpus)->required();
    evaluate->add_option("--specs", eval_specs, "comma-separated decoder specs");
    evaluate->add_option("--thresholds", eval_thresholds, "comma-separated L values");
    evaluate->add_option("--cap", eval_cap, "decode cap (default max threshold)");
    evaluate->add_option("--context-len", eval_context_len,
                         "context split (default from checkpoint)");
    evaluate->add_option("--seed", eval_seed);
    evaluate->add_option("--out", eval_out, "metrics JSON file (default stdout)");
    evaluate->add_option("--csv", eval_csv, "optional r_nt CSV file");

    std::string verify_suite = "all", verify_out;
    std::uint64_t verify_seed = 12345;
    int verify_trials = 2000;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run a verification suite; nonzero exit on failure");
    verify_cmd->add_option("--suite", verify_suite, "heads|decoders|consistency|branch|all");
    verify_cmd->add_option("--seed", verify_seed);
    verify_cmd->add_option("--trials", verify_trials);
    verify_cmd->add_option("--out", verify_out, "suite results JSON file");

    try {
        app.parse(argc, argv);
        if (train->parsed()) return cmd_train(train_args);
        if (generate->parsed())
            return cmd_generate(gen_ckpt, gen_contexts, gen_spec, gen_cap, gen_seed, gen_out);
        if (evaluate->parsed())
            return cmd_eval(eval_ckpt, eval_corpus, eval_specs, eval_thresholds, eval_cap,
                            eval_context_len, eval_seed, eval_out, eval_csv);
        if (verify_cmd->parsed())
            return cmd_verify(verify_suite, verify_seed, verify_trials, verify_out);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
