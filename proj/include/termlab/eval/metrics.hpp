#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "termlab/decode/decoders.hpp"
#include "termlab/net/train.hpp"

namespace termlab::eval {

/// exp(total NLL / total continuation tokens). All targets must be
/// terminated sequences.
double perplexity(const ConditionalModel& model, const std::vector<net::Example>& dataset);

/// One generation per context under one decoder spec.
struct GenerationRecord {
    std::size_t context_index = 0;
    Context context;
    Sequence output;
    bool terminated = false;
    std::vector<double> eos_trace;
    double score = 0.0;
    std::uint64_t seed = 0;
    std::size_t beam_final_set_size = 0; // beam runs only
};

struct GenerationReport {
    std::string model_id;
    decode::DecoderSpec spec;
    std::int64_t cap = 0;
    std::vector<GenerationRecord> records;
};

/// Fraction of records with decoded length > L per threshold; runs that
/// hit the cap count as infinite length. Thresholds above the cap are an
/// error (the report cannot distinguish them).
std::map<std::int64_t, double> non_termination_ratio(const GenerationReport& report,
                                                     const std::vector<std::int64_t>& thresholds);

/// Teacher-forced p(eos | y_<t, x) along `target`, aligned to its tokens.
std::vector<double> eos_trace(const ConditionalModel& model, const Context& context,
                              const Sequence& target);

struct MetricsRecord {
    std::string model_id;
    std::optional<double> perplexity;
    // spec string -> (threshold L -> ratio)
    std::map<std::string, std::map<std::int64_t, double>> r_nt;
    std::size_t num_contexts = 0;
    std::uint64_t master_seed = 0;
    std::int64_t cap = 0;
};

struct CampaignOptions {
    std::uint64_t master_seed = 0;
    std::vector<std::int64_t> thresholds{10, 100, 1000, 10000, 100000};
    std::string model_id = "model";
};

struct CampaignResult {
    MetricsRecord metrics;
    std::vector<GenerationReport> reports; // one per spec
};

/// Decodes every (context, spec) pair. Per-run seeds derive from
/// (master_seed, context index, spec string), so results are independent
/// of execution order.
CampaignResult run_campaign(const ConditionalModel& model, const std::vector<Context>& contexts,
                            const std::vector<decode::DecoderSpec>& specs,
                            const CampaignOptions& options);

// ---- report emission (schemas documented in the README) ----

std::string record_to_json_line(const GenerationRecord& record, const std::string& spec_string,
                                const Vocabulary& vocab);
void write_report_jsonl(const GenerationReport& report, const Vocabulary& vocab,
                        const std::string& path);
std::string metrics_to_json(const MetricsRecord& metrics);
void write_metrics_json(const MetricsRecord& metrics, const std::string& path);
void write_rnt_csv(const MetricsRecord& metrics, const std::string& path);

} // namespace termlab::eval
