#include "termlab/eval/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace termlab::eval {

using nlohmann::json;

double perplexity(const ConditionalModel& model, const std::vector<net::Example>& dataset) {
    return net::dataset_perplexity(model, dataset);
}

std::map<std::int64_t, double> non_termination_ratio(
    const GenerationReport& report, const std::vector<std::int64_t>& thresholds) {
    if (report.records.empty()) throw std::invalid_argument("non_termination_ratio: no records");
    for (std::int64_t threshold : thresholds)
        if (threshold > report.cap)
            throw std::invalid_argument("non_termination_ratio: threshold exceeds decode cap");
    std::map<std::int64_t, double> out;
    for (std::int64_t threshold : thresholds) {
        std::size_t over = 0;
        for (const GenerationRecord& rec : report.records) {
            bool exceeds = !rec.terminated ||
                           static_cast<std::int64_t>(rec.output.length()) > threshold;
            if (exceeds) ++over;
        }
        out[threshold] = static_cast<double>(over) / static_cast<double>(report.records.size());
    }
    return out;
}

std::vector<double> eos_trace(const ConditionalModel& model, const Context& context,
                              const Sequence& target) {
    if (!target.terminated) throw std::invalid_argument("eos_trace: target not terminated");
    const TokenId eos = model.vocabulary().eos_id();
    std::vector<double> trace;
    trace.reserve(target.ids.size());
    StatePtr state = model.start(context);
    for (std::size_t i = 0; i < target.ids.size(); ++i) {
        ConditionalDistribution d = model.next(*state);
        trace.push_back(d.probs[static_cast<std::size_t>(eos)]);
        if (i + 1 < target.ids.size()) state = model.advance(*state, target.ids[i]);
    }
    return trace;
}

CampaignResult run_campaign(const ConditionalModel& model, const std::vector<Context>& contexts,
                            const std::vector<decode::DecoderSpec>& specs,
                            const CampaignOptions& options) {
    if (contexts.empty()) throw std::invalid_argument("run_campaign: no contexts");
    CampaignResult result;
    result.metrics.model_id = options.model_id;
    result.metrics.master_seed = options.master_seed;
    result.metrics.num_contexts = contexts.size();

    for (const decode::DecoderSpec& spec : specs) {
        decode::validate_spec(spec);
        for (std::int64_t threshold : options.thresholds)
            if (threshold > spec.cap)
                throw std::invalid_argument("run_campaign: threshold exceeds cap for spec " +
                                            decode::to_string(spec));
        const std::string spec_string = decode::to_string(spec);
        GenerationReport report;
        report.model_id = options.model_id;
        report.spec = spec;
        report.cap = spec.cap;
        std::uint64_t spec_salt = 0;
        for (char c : spec_string) spec_salt = spec_salt * 131 + static_cast<unsigned char>(c);

        for (std::size_t i = 0; i < contexts.size(); ++i) {
            GenerationRecord rec;
            rec.context_index = i;
            rec.context = contexts[i];
            rec.seed = Rng::mix(Rng::mix(options.master_seed, i), spec_salt);
            if (spec.kind == decode::DecoderKind::beam) {
                decode::BeamOutcome outcome =
                    decode::decode_beam(model, contexts[i], spec.k, spec.cap);
                rec.output = outcome.best.sequence;
                rec.terminated = outcome.best.terminated;
                rec.eos_trace = outcome.best.eos_trace;
                rec.score = outcome.best.score;
                rec.beam_final_set_size = outcome.final_set.size();
            } else {
                decode::DecoderSpec seeded = spec;
                seeded.seed = rec.seed;
                decode::DecodeResult r = decode::decode(model, contexts[i], seeded);
                rec.output = r.sequence;
                rec.terminated = r.terminated;
                rec.eos_trace = r.eos_trace;
                rec.score = r.score;
            }
            report.records.push_back(std::move(rec));
        }
        result.metrics.r_nt[spec_string] = non_termination_ratio(report, options.thresholds);
        result.metrics.cap = std::max(result.metrics.cap, spec.cap);
        result.reports.push_back(std::move(report));
    }
    return result;
}

std::string record_to_json_line(const GenerationRecord& record, const std::string& spec_string,
                                const Vocabulary& vocab) {
    json j;
    j["context_index"] = record.context_index;
    j["spec"] = spec_string;
    j["seed"] = record.seed;
    j["context_ids"] = record.context.ids;
    j["token_ids"] = record.output.ids;
    j["tokens"] = decode_tokens(vocab, record.output.ids);
    j["length"] = record.output.length();
    j["terminated"] = record.terminated;
    j["eos_trace"] = record.eos_trace;
    j["score"] = record.score;
    if (spec_string.rfind("beam", 0) == 0) j["beam_final_set_size"] = record.beam_final_set_size;
    return j.dump();
}

void write_report_jsonl(const GenerationReport& report, const Vocabulary& vocab,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open report file: " + path);
    const std::string spec_string = decode::to_string(report.spec);
    for (const GenerationRecord& rec : report.records)
        out << record_to_json_line(rec, spec_string, vocab) << '\n';
}

std::string metrics_to_json(const MetricsRecord& metrics) {
    json j;
    j["model_id"] = metrics.model_id;
    if (metrics.perplexity) j["perplexity"] = *metrics.perplexity;
    j["num_contexts"] = metrics.num_contexts;
    j["master_seed"] = metrics.master_seed;
    j["cap"] = metrics.cap;
    json rnt = json::object();
    for (const auto& [spec, curve] : metrics.r_nt) {
        json per_spec = json::object();
        for (const auto& [threshold, ratio] : curve) per_spec[std::to_string(threshold)] = ratio;
        rnt[spec] = per_spec;
    }
    j["r_nt"] = rnt;
    return j.dump(2);
}

void write_metrics_json(const MetricsRecord& metrics, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open metrics file: " + path);
    out << metrics_to_json(metrics) << '\n';
}

void write_rnt_csv(const MetricsRecord& metrics, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open csv file: " + path);
    out << "spec,L,r_nt\n";
    for (const auto& [spec, curve] : metrics.r_nt)
        for (const auto& [threshold, ratio] : curve)
            out << spec << ',' << threshold << ',' << ratio << '\n';
}

} // namespace termlab::eval
