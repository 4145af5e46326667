#include "rsmdp/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rsmdp {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

namespace {

using nlohmann::json;

void append_row(std::string& out, const double* row, int n) {
    out += '[';
    for (int j = 0; j < n; ++j) {
        if (j) out += ',';
        out += format_double(row[j]);
    }
    out += ']';
}

std::string quote(const std::string& s) {
    return json(s).dump();  // JSON string escaping
}

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, true);
    if (!j.is_object()) throw std::invalid_argument("model JSON must be an object");
    return j;
}

// Shared layout of MdpModel and TransformedMdp.
template <typename ModelLike>
std::string core_json(const ModelLike& m, const std::string& extra_fields,
                      const std::vector<std::string>& labels) {
    const int n = m.n_states;
    const int na = m.n_actions;
    std::string out = "{\n";
    out += "  \"n_states\": " + std::to_string(n) + ",\n";
    out += "  \"n_actions\": " + std::to_string(na) + ",\n";
    out += "  \"transition\": [";
    for (int s = 0; s < n; ++s) {
        if (s) out += ',';
        out += "\n    [";
        for (int a = 0; a < na; ++a) {
            if (a) out += ',';
            append_row(out, &m.transition[(static_cast<std::size_t>(s) * na + a) * n], n);
        }
        out += ']';
    }
    out += "\n  ],\n";
    out += "  \"cost\": [";
    for (int s = 0; s < n; ++s) {
        if (s) out += ',';
        append_row(out, &m.cost[static_cast<std::size_t>(s) * na], na);
    }
    out += ']';
    if (!labels.empty()) {
        out += ",\n  \"labels\": [";
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (i) out += ',';
            out += quote(labels[i]);
        }
        out += ']';
    }
    out += extra_fields;
    out += "\n}\n";
    return out;
}

template <typename ModelLike>
void read_core(const json& j, ModelLike& m) {
    if (!j.contains("n_states") || !j.contains("n_actions") ||
        !j.contains("transition") || !j.contains("cost"))
        throw std::invalid_argument(
            "model JSON needs n_states, n_actions, transition and cost");
    m.n_states = j.at("n_states").get<int>();
    m.n_actions = j.at("n_actions").get<int>();
    if (m.n_states < 1 || m.n_actions < 1)
        throw std::invalid_argument("model dimensions must be positive");
    const int n = m.n_states;
    const int na = m.n_actions;

    const json& trans = j.at("transition");
    if (!trans.is_array() || static_cast<int>(trans.size()) != n)
        throw std::invalid_argument("transition must be an array of n_states entries");
    m.transition.resize(static_cast<std::size_t>(n) * na * n);
    for (int s = 0; s < n; ++s) {
        const json& per_action = trans.at(s);
        if (!per_action.is_array() || static_cast<int>(per_action.size()) != na)
            throw std::invalid_argument("transition rows must have n_actions entries");
        for (int a = 0; a < na; ++a) {
            const json& row = per_action.at(a);
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                throw std::invalid_argument("transition rows must have n_states entries");
            for (int s2 = 0; s2 < n; ++s2)
                m.transition[(static_cast<std::size_t>(s) * na + a) * n + s2] =
                    row.at(s2).get<double>();
        }
    }

    const json& cost = j.at("cost");
    if (!cost.is_array() || static_cast<int>(cost.size()) != n)
        throw std::invalid_argument("cost must be an array of n_states entries");
    m.cost.resize(static_cast<std::size_t>(n) * na);
    for (int s = 0; s < n; ++s) {
        const json& row = cost.at(s);
        if (!row.is_array() || static_cast<int>(row.size()) != na)
            throw std::invalid_argument("cost rows must have n_actions entries");
        for (int a = 0; a < na; ++a)
            m.cost[static_cast<std::size_t>(s) * na + a] = row.at(a).get<double>();
    }
}

}  // namespace

std::string model_to_json(const MdpModel& model) {
    return core_json(model, "", model.labels);
}

MdpModel model_from_json(const std::string& text) {
    json j = parse(text);
    MdpModel m;
    read_core(j, m);
    if (j.contains("labels")) {
        for (const auto& l : j.at("labels")) m.labels.push_back(l.get<std::string>());
        if (static_cast<int>(m.labels.size()) != m.n_states)
            throw std::invalid_argument("labels must have one entry per state");
    }
    auto [lo, hi] = std::minmax_element(m.cost.begin(), m.cost.end());
    m.cost_lo = *lo;
    m.cost_hi = *hi;
    return m;
}

void save_model(const MdpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << model_to_json(model);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

MdpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

std::string transformed_to_json(const TransformedMdp& tmdp) {
    std::string extra = ",\n  \"alpha\": " + format_double(tmdp.alpha) +
                        ",\n  \"kappa\": " + format_double(tmdp.kappa) +
                        ",\n  \"cost_lo\": " + format_double(tmdp.cost_lo) +
                        ",\n  \"cost_hi\": " + format_double(tmdp.cost_hi) +
                        ",\n  \"source_digest\": " + quote(tmdp.source_digest);
    return core_json(tmdp, extra, {});
}

TransformedMdp transformed_from_json(const std::string& text) {
    json j = parse(text);
    TransformedMdp t;
    read_core(j, t);
    t.alpha = j.at("alpha").get<double>();
    t.kappa = j.at("kappa").get<double>();
    t.cost_lo = j.value("cost_lo", 0.0);
    t.cost_hi = j.value("cost_hi", 0.0);
    t.source_digest = j.at("source_digest").get<std::string>();
    return t;
}

}  // namespace rsmdp
