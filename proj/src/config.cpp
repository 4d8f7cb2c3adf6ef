#include "srl/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "srl/output.hpp"

namespace srl {

const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::steady: return "steady";
        case RunMode::spectrum: return "spectrum";
        case RunMode::sweep: return "sweep";
        case RunMode::scaling: return "scaling";
        case RunMode::oracle_check: return "oracle-check";
        case RunMode::fig5: return "fig5";
    }
    return "unknown";
}

std::optional<RunMode> mode_from_string(const std::string& name) {
    if (name == "steady") return RunMode::steady;
    if (name == "spectrum") return RunMode::spectrum;
    if (name == "sweep") return RunMode::sweep;
    if (name == "scaling") return RunMode::scaling;
    if (name == "oracle-check") return RunMode::oracle_check;
    if (name == "fig5") return RunMode::fig5;
    return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& value, int line, const std::string& key) {
    const std::string v = trim(value);
    if (v.empty()) {
        throw ConfigError(line, "empty value for key '" + key + "'");
    }
    char* end = nullptr;
    const double parsed = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || !std::isfinite(parsed)) {
        throw ConfigError(line, "non-numeric value '" + v + "' for key '" + key + "'");
    }
    return parsed;
}

int parse_int(const std::string& value, int line, const std::string& key) {
    const double d = parse_number(value, line, key);
    if (std::abs(d - std::round(d)) > 1e-9) {
        throw ConfigError(line, "key '" + key + "' requires an integer");
    }
    return static_cast<int>(std::llround(d));
}

bool parse_bool(const std::string& value, int line, const std::string& key) {
    const std::string v = trim(value);
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError(line, "key '" + key + "' requires a boolean (true/false)");
}

Eigen::Vector3d parse_vec3(const std::string& value, int line, const std::string& key) {
    std::vector<double> comps;
    std::stringstream ss(value);
    std::string part;
    while (std::getline(ss, part, ',')) {
        comps.push_back(parse_number(part, line, key));
    }
    if (comps.size() != 3) {
        throw ConfigError(line, "key '" + key + "' requires three comma-separated components");
    }
    return {comps[0], comps[1], comps[2]};
}

std::vector<Eigen::Vector3d> parse_positions(const std::string& value, int line) {
    std::vector<Eigen::Vector3d> out;
    std::stringstream ss(value);
    std::string triple;
    while (std::getline(ss, triple, ';')) {
        const std::string t = trim(triple);
        if (t.empty()) continue;
        out.push_back(parse_vec3(t, line, "positions"));
    }
    if (out.empty()) {
        throw ConfigError(line, "key 'positions' lists no atoms");
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::string section;
    std::istringstream stream(text);
    std::string raw;
    int line = 0;
    while (std::getline(stream, raw)) {
        ++line;
        const auto hash_pos = raw.find('#');
        std::string in = trim(hash_pos == std::string::npos ? raw : raw.substr(0, hash_pos));
        if (in.empty()) continue;
        if (in.front() == '[') {
            if (in.back() != ']') {
                throw ConfigError(line, "malformed section header '" + in + "'");
            }
            section = trim(in.substr(1, in.size() - 2));
            if (section != "system" && section != "geometry" && section != "sweep" &&
                section != "output") {
                throw ConfigError(line, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = in.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line, "expected 'key = value', got '" + in + "'");
        }
        const std::string key = trim(in.substr(0, eq));
        const std::string value = trim(in.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError(line, "key '" + key + "' appears before any section");
        }

        if (section == "system") {
            if (key == "n_atoms") {
                cfg.params.n_atoms = parse_int(value, line, key);
                if (cfg.params.n_atoms < 1) throw ConfigError(line, "n_atoms must be >= 1");
            } else if (key == "g") {
                cfg.params.g = parse_number(value, line, key);
                if (cfg.params.g < 0) throw ConfigError(line, "g must be >= 0");
            } else if (key == "kappa") {
                cfg.params.kappa = parse_number(value, line, key);
                if (cfg.params.kappa < 0) throw ConfigError(line, "kappa must be >= 0");
            } else if (key == "w") {
                cfg.params.w = parse_number(value, line, key);
                if (cfg.params.w < 0) throw ConfigError(line, "w must be >= 0");
            } else if (key == "delta") {
                cfg.params.delta = parse_number(value, line, key);
            } else if (key == "gamma_hz") {
                const double v = parse_number(value, line, key);
                if (!(v > 0)) throw ConfigError(line, "gamma_hz must be > 0");
                cfg.gamma_hz = v;
            } else if (key == "tolerance") {
                cfg.tolerance = parse_number(value, line, key);
                if (!(cfg.tolerance > 0)) throw ConfigError(line, "tolerance must be > 0");
            } else if (key == "max_iterations") {
                cfg.max_iterations = parse_int(value, line, key);
                if (cfg.max_iterations < 1) throw ConfigError(line, "max_iterations must be >= 1");
            } else if (key == "fock_cutoff") {
                cfg.fock_cutoff = parse_int(value, line, key);
                if (cfg.fock_cutoff < 2) throw ConfigError(line, "fock_cutoff must be >= 2");
            } else {
                throw ConfigError(line, "unknown key '" + key + "' in section [system]");
            }
        } else if (section == "geometry") {
            if (key == "spacing") {
                const double v = parse_number(value, line, key);
                if (!(v > 0)) throw ConfigError(line, "spacing must be > 0");
                cfg.geometry.spacing = v;
            } else if (key == "positions") {
                cfg.geometry.positions = parse_positions(value, line);
            } else if (key == "dipole") {
                Eigen::Vector3d d = parse_vec3(value, line, key);
                const double norm = d.norm();
                if (!(norm > 0)) throw ConfigError(line, "dipole must be a nonzero vector");
                cfg.geometry.dipole = d / norm;
            } else if (key == "interactions") {
                cfg.geometry.interactions = parse_bool(value, line, key);
            } else {
                throw ConfigError(line, "unknown key '" + key + "' in section [geometry]");
            }
        } else if (section == "sweep") {
            if (key == "axis") {
                if (value != "spacing" && value != "pump" && value != "n_atoms") {
                    throw ConfigError(line, "axis must be spacing, pump or n_atoms");
                }
                cfg.sweep.axis = value;
            } else if (key == "scale") {
                if (value != "log" && value != "linear") {
                    throw ConfigError(line, "scale must be log or linear");
                }
                cfg.sweep.scale = value;
            } else if (key == "min") {
                cfg.sweep.min = parse_number(value, line, key);
            } else if (key == "max") {
                cfg.sweep.max = parse_number(value, line, key);
            } else if (key == "points") {
                cfg.sweep.points = parse_int(value, line, key);
                if (cfg.sweep.points < 0) throw ConfigError(line, "points must be >= 0");
            } else if (key == "compute_spectrum") {
                cfg.sweep.compute_spectrum = parse_bool(value, line, key);
            } else if (key == "refine") {
                cfg.sweep.refine = parse_bool(value, line, key);
            } else if (key == "objective") {
                if (value != "max_photon" && value != "min_fwhm") {
                    throw ConfigError(line, "objective must be max_photon or min_fwhm");
                }
                cfg.sweep.objective = value;
            } else if (key == "n_min") {
                cfg.sweep.n_min = parse_int(value, line, key);
                if (cfg.sweep.n_min < 1) throw ConfigError(line, "n_min must be >= 1");
            } else if (key == "n_max") {
                cfg.sweep.n_max = parse_int(value, line, key);
                if (cfg.sweep.n_max < 1) throw ConfigError(line, "n_max must be >= 1");
            } else if (key == "n_target") {
                cfg.sweep.n_target = parse_number(value, line, key);
                if (!(cfg.sweep.n_target > 0)) throw ConfigError(line, "n_target must be > 0");
            } else {
                throw ConfigError(line, "unknown key '" + key + "' in section [sweep]");
            }
        } else if (section == "output") {
            if (key == "dir") {
                cfg.output.dir = value;
            } else if (key == "prefix") {
                cfg.output.prefix = value;
            } else {
                throw ConfigError(line, "unknown key '" + key + "' in section [output]");
            }
        }
    }

    if (!cfg.params.bad_cavity()) {
        cfg.warnings.push_back("parameters leave the bad-cavity regime (kappa is not >> g)");
    }
    return cfg;
}

std::string canonical_config(const RunConfig& cfg) {
    std::string out;
    out += "[system]\n";
    out += "n_atoms = " + std::to_string(cfg.params.n_atoms) + "\n";
    out += "g = " + format_double(cfg.params.g) + "\n";
    out += "kappa = " + format_double(cfg.params.kappa) + "\n";
    out += "w = " + format_double(cfg.params.w) + "\n";
    out += "delta = " + format_double(cfg.params.delta) + "\n";
    if (cfg.gamma_hz) {
        out += "gamma_hz = " + format_double(*cfg.gamma_hz) + "\n";
    }
    out += "tolerance = " + format_double(cfg.tolerance) + "\n";
    out += "max_iterations = " + std::to_string(cfg.max_iterations) + "\n";
    out += "fock_cutoff = " + std::to_string(cfg.fock_cutoff) + "\n";
    out += "[geometry]\n";
    if (cfg.geometry.spacing) {
        out += "spacing = " + format_double(*cfg.geometry.spacing) + "\n";
    }
    if (!cfg.geometry.positions.empty()) {
        out += "positions = ";
        for (std::size_t i = 0; i < cfg.geometry.positions.size(); ++i) {
            const auto& p = cfg.geometry.positions[i];
            if (i) out += "; ";
            out += format_double(p.x()) + "," + format_double(p.y()) + "," + format_double(p.z());
        }
        out += "\n";
    }
    out += "dipole = " + format_double(cfg.geometry.dipole.x()) + "," +
           format_double(cfg.geometry.dipole.y()) + "," + format_double(cfg.geometry.dipole.z()) +
           "\n";
    out += "interactions = " + std::string(cfg.geometry.interactions ? "true" : "false") + "\n";
    out += "[sweep]\n";
    out += "axis = " + cfg.sweep.axis + "\n";
    out += "scale = " + cfg.sweep.scale + "\n";
    out += "min = " + format_double(cfg.sweep.min) + "\n";
    out += "max = " + format_double(cfg.sweep.max) + "\n";
    out += "points = " + std::to_string(cfg.sweep.points) + "\n";
    out += "compute_spectrum = " + std::string(cfg.sweep.compute_spectrum ? "true" : "false") + "\n";
    out += "refine = " + std::string(cfg.sweep.refine ? "true" : "false") + "\n";
    out += "objective = " + cfg.sweep.objective + "\n";
    out += "n_min = " + std::to_string(cfg.sweep.n_min) + "\n";
    out += "n_max = " + std::to_string(cfg.sweep.n_max) + "\n";
    out += "n_target = " + format_double(cfg.sweep.n_target) + "\n";
    out += "[output]\n";
    out += "dir = " + cfg.output.dir + "\n";
    out += "prefix = " + cfg.output.prefix + "\n";
    return out;
}

}  // namespace srl
