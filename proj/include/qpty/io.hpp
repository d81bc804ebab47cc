#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qpty/mitigation.hpp"
#include "qpty/pie.hpp"
#include "qpty/protocol.hpp"
#include "qpty/state.hpp"
#include "qpty/transforms.hpp"

// JSON documents:
//
//   state:       {"n", "normalized", "amps": [[re, im], ...], "provenance"?: {"kind", "tag"?, "seed"?}}
//   unitary:     {"kind": "qft" | "aqft" | "hadamard" | "separable", "m"?, "angles"?: [[theta, phi, lambda], ...]}
//   dataset:     {"n", "unitary", "shots", "seed", "noise_model_id"?, "mitigated",
//                 "records": [{"xi": "X" | "Y" | "Z", "q", "counts": [...]}]}
//   calibration: {"n", "M1": [4, row-major], "Mn": [4^n, row-major],
//                 "provenance": {"model_id", "shots", "seed"}}
//
// CSV: dataset export (xi,q,s,j,count; s = 0 for +, 1 for -) and PIE trace (iteration,beta,distance,fidelity).

namespace qpty::io {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal form that round-trips.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct StateProvenance {
    std::string kind; ///< "named", "random_separable", "random_arbitrary", "estimate"
    std::optional<std::string> tag;
    std::optional<std::uint64_t> seed;
};

inline json to_json(const StateVector &s, const std::optional<StateProvenance> &prov = {}) {
    json amps = json::array();
    for (const auto &a : s.amplitudes()) {
        amps.push_back({a.real(), a.imag()});
    }
    json j = {{"n", s.qubits()}, {"normalized", s.normalized()}, {"amps", std::move(amps)}};
    if (prov) {
        json p = {{"kind", prov->kind}};
        if (prov->tag) {
            p["tag"] = *prov->tag;
        }
        if (prov->seed) {
            p["seed"] = *prov->seed;
        }
        j["provenance"] = std::move(p);
    }
    return j;
}

inline StateVector state_from_json(const json &j) {
    try {
        const int n = j.at("n").get<int>();
        const auto &amps = j.at("amps");
        if (n < 1 || n > 24 || amps.size() != (std::size_t{1} << n)) {
            throw FormatError("state: amps length " + std::to_string(amps.size()) +
                              " does not equal 2^n for n=" + std::to_string(n));
        }
        std::vector<cplx> v;
        v.reserve(amps.size());
        for (const auto &a : amps) {
            if (!a.is_array() || a.size() != 2) {
                throw FormatError("state: each amplitude must be a [re, im] pair");
            }
            v.emplace_back(a[0].get<double>(), a[1].get<double>());
        }
        StateVector s(n, std::move(v));
        if (j.value("normalized", false) && !s.normalized()) {
            throw FormatError("state: flagged normalized but norm^2 = " +
                              format_double(s.norm_squared()));
        }
        return s;
    } catch (const json::exception &e) {
        throw FormatError(std::string("state: ") + e.what());
    }
}

inline std::optional<StateProvenance> provenance_from_json(const json &j) {
    if (!j.contains("provenance")) {
        return std::nullopt;
    }
    const auto &p = j.at("provenance");
    StateProvenance out{p.at("kind").get<std::string>(), std::nullopt, std::nullopt};
    if (p.contains("tag")) {
        out.tag = p.at("tag").get<std::string>();
    }
    if (p.contains("seed")) {
        out.seed = p.at("seed").get<std::uint64_t>();
    }
    return out;
}

inline json to_json(const UnitarySpec &u) {
    json j = {{"kind", u.kind == UnitarySpec::Kind::Qft        ? "qft"
                       : u.kind == UnitarySpec::Kind::Aqft     ? "aqft"
                       : u.kind == UnitarySpec::Kind::Hadamard ? "hadamard"
                                                               : "separable"}};
    if (u.kind == UnitarySpec::Kind::Aqft) {
        j["m"] = u.m;
    }
    if (u.kind == UnitarySpec::Kind::Separable) {
        json a = json::array();
        for (const auto &t : u.angles) {
            a.push_back({t[0], t[1], t[2]});
        }
        j["angles"] = std::move(a);
    }
    return j;
}

inline UnitarySpec unitary_from_json(const json &j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "qft") {
            return UnitarySpec::qft();
        }
        if (kind == "aqft") {
            return UnitarySpec::aqft(j.at("m").get<int>());
        }
        if (kind == "hadamard") {
            return UnitarySpec::hadamard();
        }
        if (kind == "separable") {
            std::vector<EulerAngles> angles;
            for (const auto &t : j.at("angles")) {
                if (t.size() != 3) {
                    throw FormatError("unitary: angle entries must be [theta, phi, lambda]");
                }
                angles.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
            }
            return UnitarySpec::separable(std::move(angles));
        }
        throw FormatError("unitary: unknown kind '" + kind + "'");
    } catch (const json::exception &e) {
        throw FormatError(std::string("unitary: ") + e.what());
    }
}

inline json to_json(const PtychoDataset &ds) {
    json records = json::array();
    for (const auto &r : ds.records) {
        records.push_back({{"xi", std::string(1, to_char(r.xi))}, {"q", r.q}, {"counts", r.counts}});
    }
    json j = {{"n", ds.n},
              {"unitary", to_json(ds.unitary)},
              {"shots", ds.shots},
              {"seed", ds.seed},
              {"mitigated", ds.mitigated},
              {"records", std::move(records)}};
    if (ds.noise_model_id) {
        j["noise_model_id"] = *ds.noise_model_id;
    }
    return j;
}

inline PtychoDataset dataset_from_json(const json &j) {
    try {
        PtychoDataset ds;
        ds.n = j.at("n").get<int>();
        ds.unitary = unitary_from_json(j.at("unitary"));
        ds.shots = j.at("shots").get<std::uint64_t>();
        ds.seed = j.value("seed", std::uint64_t{0});
        ds.mitigated = j.value("mitigated", false);
        if (j.contains("noise_model_id") && !j.at("noise_model_id").is_null()) {
            ds.noise_model_id = j.at("noise_model_id").get<std::string>();
        }
        for (const auto &r : j.at("records")) {
            const auto xi = r.at("xi").get<std::string>();
            if (xi.size() != 1) {
                throw FormatError("dataset: xi must be one of X, Y, Z");
            }
            ds.records.push_back(
                {pauli_from_char(xi[0]), r.at("q").get<int>(), r.at("counts").get<std::vector<double>>()});
        }
        ds.validate();
        return ds;
    } catch (const json::exception &e) {
        throw FormatError(std::string("dataset: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw FormatError(e.what());
    }
}

inline json to_json(const CalibrationMatrix &cal) {
    std::vector<double> m1 = {cal.m1(0, 0), cal.m1(0, 1), cal.m1(1, 0), cal.m1(1, 1)};
    std::vector<double> mn;
    mn.reserve(static_cast<std::size_t>(cal.mn.size()));
    for (Eigen::Index r = 0; r < cal.mn.rows(); ++r) {
        for (Eigen::Index c = 0; c < cal.mn.cols(); ++c) {
            mn.push_back(cal.mn(r, c));
        }
    }
    return {{"n", cal.n},
            {"M1", m1},
            {"Mn", mn},
            {"provenance",
             {{"model_id", cal.provenance.model_id},
              {"shots", cal.provenance.shots},
              {"seed", cal.provenance.seed}}}};
}

inline CalibrationMatrix calibration_from_json(const json &j) {
    try {
        CalibrationMatrix cal;
        cal.n = j.at("n").get<int>();
        if (cal.n < 1 || cal.n > 16) {
            throw FormatError("calibration: n out of range");
        }
        const auto m1 = j.at("M1").get<std::vector<double>>();
        const auto mn = j.at("Mn").get<std::vector<double>>();
        const std::size_t d = std::size_t{1} << cal.n;
        if (m1.size() != 4 || mn.size() != d * d) {
            throw FormatError("calibration: M1 needs 4 entries and Mn needs 4^n entries");
        }
        cal.m1 << m1[0], m1[1], m1[2], m1[3];
        cal.mn.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                cal.mn(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = mn[r * d + c];
            }
        }
        if (j.contains("provenance")) {
            const auto &p = j.at("provenance");
            cal.provenance.model_id = p.value("model_id", std::string{});
            cal.provenance.shots = p.value("shots", std::uint64_t{0});
            cal.provenance.seed = p.value("seed", std::uint64_t{0});
        }
        return cal;
    } catch (const json::exception &e) {
        throw FormatError(std::string("calibration: ") + e.what());
    }
}

inline json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw FormatError("'" + path + "': " + e.what());
    }
}

/// Two-space indented JSON with a trailing newline.
inline std::string dump(const json &j) { return j.dump(2) + "\n"; }

inline void write_dataset_csv(std::ostream &os, const PtychoDataset &ds) {
    const std::size_t dim = std::size_t{1} << ds.n;
    os << "xi,q,s,j,count\n";
    for (const auto &r : ds.records) {
        for (std::size_t o = 0; o < r.counts.size(); ++o) {
            os << to_char(r.xi) << ',' << r.q << ',' << (o < dim ? 0 : 1) << ',' << (o % dim)
               << ',' << format_double(r.counts[o]) << '\n';
        }
    }
}

inline void write_trace_csv(std::ostream &os, const PieTrace &trace) {
    os << "iteration,beta,distance,fidelity\n";
    for (const auto &r : trace.rows) {
        os << r.iteration << ',' << format_double(r.beta) << ',' << format_double(r.distance) << ',';
        if (r.fidelity) {
            os << format_double(*r.fidelity);
        }
        os << '\n';
    }
}

} // namespace qpty::io
