#include "rsmdp/trace_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rsmdp/model_io.hpp"

namespace rsmdp {

std::string policy_to_string(const DeterministicPolicy& policy) {
    std::string out;
    for (std::size_t i = 0; i < policy.action.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(policy.action[i]);
    }
    return out;
}

DeterministicPolicy policy_from_string(const std::string& text) {
    DeterministicPolicy policy;
    if (text.empty()) throw std::invalid_argument("empty policy spec");
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t dash = text.find('-', pos);
        std::string tok = text.substr(pos, dash == std::string::npos ? dash : dash - pos);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("policy spec must be dash-joined action indices");
        policy.action.push_back(std::stoi(tok));
        if (dash == std::string::npos) break;
        pos = dash + 1;
    }
    return policy;
}

std::string trace_to_csv(const MpiTrace& trace) {
    const bool approx = !trace.records.empty() &&
                        trace.records.front().improvement_ratio_max.has_value();
    std::string out = "iter,u,l,u_minus_l,policy,lambda_tilde_policy,min_value_entry";
    if (approx) out += ",epsilon_ratio_max,eval_ratio_min,eval_ratio_max";
    out += '\n';
    for (const MpiIterationRecord& rec : trace.records) {
        out += std::to_string(rec.index);
        out += ',';
        out += format_double(rec.upper);
        out += ',';
        out += format_double(rec.lower);
        out += ',';
        out += format_double(rec.upper - rec.lower);
        out += ',';
        out += policy_to_string(rec.policy);
        out += ',';
        if (rec.policy_lambda_tilde) out += format_double(*rec.policy_lambda_tilde);
        out += ',';
        double mv = *std::min_element(rec.value.entries.begin(), rec.value.entries.end());
        out += format_double(mv);
        if (approx) {
            out += ',';
            if (rec.improvement_ratio_max) out += format_double(*rec.improvement_ratio_max);
            out += ',';
            if (rec.eval_ratio_min) out += format_double(*rec.eval_ratio_min);
            out += ',';
            if (rec.eval_ratio_max) out += format_double(*rec.eval_ratio_max);
        }
        out += '\n';
    }
    return out;
}

void write_trace_csv(const MpiTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << trace_to_csv(trace);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace rsmdp
