#pragma once

#include <filesystem>
#include <string>

#include "rsmdp/mpi.hpp"

namespace rsmdp {

// CSV trace export, one row per iteration:
//   iter,u,l,u_minus_l,policy,lambda_tilde_policy,min_value_entry
// policy is the dash-joined action indices; lambda_tilde_policy is empty
// when diagnostics were off. Traces from approximate runs append
// epsilon_ratio_max, eval_ratio_min and eval_ratio_max columns.
std::string trace_to_csv(const MpiTrace& trace);

void write_trace_csv(const MpiTrace& trace, const std::filesystem::path& path);

// Dash-joined action indices, e.g. "0-2-1".
std::string policy_to_string(const DeterministicPolicy& policy);
DeterministicPolicy policy_from_string(const std::string& text);

}  // namespace rsmdp
