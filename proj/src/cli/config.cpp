#include "dosc/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

namespace dosc::cli {

namespace {

enum class Kind { number, integer, boolean, text, number_list, apparatus, epsilon_axis };

struct Field {
    std::string name;
    Kind kind;
    Json fallback;  // null means "no default, optional"
    bool sweepable = false;
    std::vector<std::string> choices{};
};

constexpr double two_pi = 2.0 * std::numbers::pi;
const std::vector<std::string> hamiltonians{"full_dirac", "nonrelativistic"};

const std::map<std::string, std::vector<Field>>& schemas() {
    static const std::map<std::string, std::vector<Field>> s{
        {"spectrum",
         {{"epsilon_min", Kind::number, 1e-2},
          {"epsilon_max", Kind::number, 10.0},
          {"epsilon_points", Kind::integer, 61},
          {"curve_n_max", Kind::integer, 4},
          {"weight_n_max", Kind::integer, 3},
          {"validate_epsilon", Kind::number_list, Json::array({0.01, 0.1, 1.0, 10.0})},
          {"fock_cutoff", Kind::integer, 128},
          {"n_max", Kind::integer, 10}}},
        {"evolve",
         {{"epsilon", Kind::number, 1e-2, true},
          {"n", Kind::integer, 1, true},
          {"g_times_nb", Kind::number, 0.0, true},
          {"f", Kind::number, 0.0, true},
          {"initial", Kind::text, "balanced", false, {"balanced", "positive", "negative"}},
          {"hamiltonian", Kind::text, "full_dirac", false, hamiltonians},
          {"t_end", Kind::number, two_pi},
          {"points", Kind::integer, 2001},
          {"fock_cutoff", Kind::integer, 64}}},
        {"backaction",
         {{"epsilon", Kind::number, 1e-4, true},
          {"n", Kind::integer, 1, true},
          {"G", Kind::number, 0.05, true},
          {"f", Kind::number, 0.1, true},
          {"apparatus", Kind::apparatus, Json()},
          {"omega_b", Kind::number, 0.0},
          {"hamiltonian", Kind::text, "full_dirac", false, hamiltonians},
          {"t_end", Kind::number, two_pi},
          {"points_per_period", Kind::integer, 16},
          {"fock_cutoff", Kind::integer, 64},
          {"fit", Kind::boolean, false},
          {"residual_threshold", Kind::number, 0.05}}},
        {"sweep",
         {{"epsilon", Kind::epsilon_axis, Json::array({1e-5, 1e-4, 1e-3}), true},
          {"n", Kind::integer, 1, true},
          {"G", Kind::number, 0.25, true},
          {"f", Kind::number, 0.1, true},
          {"t_end", Kind::number, two_pi},
          {"points_per_period", Kind::integer, 16},
          {"fock_cutoff", Kind::integer, 64},
          {"residual_threshold", Kind::number, 0.05}}},
        {"fw-check",
         {{"epsilon", Kind::number, Json::array({0.1, 1.0}), true},
          {"fock_cutoff", Kind::integer, 256},
          {"interior_fraction", Kind::number, 0.6},
          {"nw_levels", Kind::integer, 10},
          {"g_times_nb", Kind::number, 0.3},
          {"f", Kind::number, 0.2}}},
        {"soc-map",
         {{"k_r", Kind::number, 8e6, true},
          {"chi", Kind::number, two_pi * 500.0, true},
          {"sigma_slope", Kind::number, Json(), true},
          {"epsilon_target", Kind::number, 0.1, true},
          {"m_a", Kind::number, 1.443160648e-25},
          {"delta", Kind::number, 0.0},
          {"grid_lengths", Kind::number, 12.0},
          {"grid_points", Kind::integer, 512},
          {"n_levels", Kind::integer, 10}}},
    };
    return s;
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_scalar(const Field& f, const Json& v) {
    switch (f.kind) {
        case Kind::number:
        case Kind::epsilon_axis:
            if (!v.is_number() || !std::isfinite(v.get<double>())) {
                fail("'" + f.name + "' must be a finite number");
            }
            break;
        case Kind::integer:
            if (!v.is_number_integer()) {
                fail("'" + f.name + "' must be an integer");
            }
            break;
        case Kind::boolean:
            if (!v.is_boolean()) {
                fail("'" + f.name + "' must be true or false");
            }
            break;
        case Kind::text: {
            if (!v.is_string()) {
                fail("'" + f.name + "' must be a string");
            }
            const auto s = v.get<std::string>();
            if (!f.choices.empty() && std::find(f.choices.begin(), f.choices.end(), s) == f.choices.end()) {
                fail("'" + f.name + "' has unknown value '" + s + "'");
            }
            break;
        }
        default:
            break;
    }
}

Json normalize(const Field& f, const Json& v) {
    if (f.kind == Kind::number_list) {
        if (!v.is_array() || v.empty()) {
            fail("'" + f.name + "' must be a non-empty array of numbers");
        }
        for (const Json& e : v) {
            check_scalar({f.name, Kind::number, Json()}, e);
        }
        return v;
    }
    if (f.kind == Kind::apparatus) {
        if (!v.is_array() || v.empty()) {
            fail("'apparatus' must be a non-empty array of {\"n_b\", \"weight\"} objects");
        }
        for (const Json& e : v) {
            if (!e.is_object() || e.size() != 2 || !e.contains("n_b") || !e.contains("weight") ||
                !e["n_b"].is_number_integer() || !e["weight"].is_number()) {
                fail("'apparatus' entries must be exactly {\"n_b\": integer, \"weight\": number}");
            }
        }
        return v;
    }
    if (f.kind == Kind::epsilon_axis && v.is_object()) {
        for (const auto& [k, _] : v.items()) {
            if (k != "log_min" && k != "log_max" && k != "points") {
                fail("'epsilon' axis object has unknown key '" + k + "'");
            }
        }
        if (!v.contains("log_min") || !v.contains("log_max") || !v.contains("points") ||
            !v["log_min"].is_number() || !v["log_max"].is_number() || !v["points"].is_number_integer()) {
            fail("'epsilon' axis object needs numeric log_min, log_max and integer points");
        }
        const double lo = v["log_min"];
        const double hi = v["log_max"];
        const int pts = v["points"];
        if (!(lo > 0.0 && hi >= lo) || pts < 1) {
            fail("'epsilon' axis needs 0 < log_min <= log_max and points >= 1");
        }
        Json out = Json::array();
        for (int i = 0; i < pts; ++i) {
            const double e = pts == 1 ? lo : std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (pts - 1));
            out.push_back(i == 0 ? lo : (i == pts - 1 ? hi : e));
        }
        return out;
    }
    if (v.is_array()) {
        if (!f.sweepable) {
            fail("'" + f.name + "' is not a sweep axis and must be a scalar");
        }
        if (v.empty()) {
            fail("sweep axis '" + f.name + "' is empty");
        }
        for (const Json& e : v) {
            check_scalar(f, e);
        }
        return v;
    }
    check_scalar(f, v);
    return v;
}

}  // namespace

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [k, _] : schemas()) {
            out.push_back(k);
        }
        return out;
    }();
    return names;
}

RunConfig parse_config(const Json& document, std::size_t max_jobs) {
    if (!document.is_object()) {
        fail("config must be a JSON object");
    }
    if (!document.contains("command") || !document["command"].is_string()) {
        fail("config needs a string 'command'");
    }
    RunConfig rc;
    rc.command = document["command"].get<std::string>();
    const auto it = schemas().find(rc.command);
    if (it == schemas().end()) {
        fail("unknown command '" + rc.command + "'");
    }
    const std::vector<Field>& fields = it->second;

    std::set<std::string> allowed{"command"};
    for (const Field& f : fields) {
        allowed.insert(f.name);
    }
    for (const auto& [key, _] : document.items()) {
        if (!allowed.count(key)) {
            fail("unknown key '" + key + "' for command '" + rc.command + "'");
        }
    }

    rc.document = Json::object();
    rc.document["command"] = rc.command;
    for (const Field& f : fields) {
        if (document.contains(f.name) && !document[f.name].is_null()) {
            rc.document[f.name] = normalize(f, document[f.name]);
        } else {
            rc.document[f.name] = f.fallback;
        }
    }
    if (rc.command == "soc-map" && document.contains("sigma_slope") && document.contains("epsilon_target")) {
        fail("give either 'sigma_slope' or 'epsilon_target', not both");
    }
    if (rc.command == "soc-map" && !rc.document["sigma_slope"].is_null()) {
        rc.document["epsilon_target"] = nullptr;
    }

    std::vector<std::string> axes;
    std::size_t jobs = 1;
    for (const Field& f : fields) {
        if (f.sweepable && rc.document[f.name].is_array()) {
            axes.push_back(f.name);
            jobs *= rc.document[f.name].size();
            if (jobs > max_jobs) {
                fail("sweep expands to more than " + std::to_string(max_jobs) + " jobs");
            }
        }
    }

    for (std::size_t j = 0; j < jobs; ++j) {
        Json job = rc.document;
        // Last axis varies fastest.
        std::size_t rem = j;
        for (auto a = axes.rbegin(); a != axes.rend(); ++a) {
            const Json& values = rc.document[*a];
            job[*a] = values[rem % values.size()];
            rem /= values.size();
        }
        job["job_index"] = j;
        rc.jobs.push_back(std::move(job));
    }
    return rc;
}

RunConfig load_config(const std::string& path, std::size_t max_jobs) {
    std::ifstream in(path);
    if (!in) {
        fail("cannot read config '" + path + "'");
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        fail("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc, max_jobs);
}

}  // namespace dosc::cli
