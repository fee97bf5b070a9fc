#pragma once

// Serialization helpers shared by the command-line front end: full-precision
// number formatting, the plain-text roots file format, and JSON echoes of
// configurations and terminations.
//
// Roots file format (general rank), hand-editable:
//   # comment
//   rank 2
//   1 1.0 0.0        <- multiplicity, then k components per root
//   1 0.0 1.0
//   x0 0.6 0.8       <- optional start point for flow commands

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "isoflow/flow.hpp"
#include "isoflow/root_system.hpp"

namespace isoflow::io {

// 17 significant digits: doubles round-trip exactly through this.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct RootsFile {
    RootSystemData rs;
    std::optional<Vec> x0;
};

inline RootsFile read_roots_file(std::istream& in, bool checked = true) {
    int rank = -1;
    std::vector<Vec> roots;
    std::vector<int> mults;
    std::optional<Vec> x0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        auto fail = [&](const std::string& what) {
            throw std::invalid_argument("roots file line " + std::to_string(lineno) + ": " + what);
        };
        if (first == "rank") {
            if (!(ls >> rank) || rank < 1) fail("invalid rank");
            continue;
        }
        if (rank < 1) fail("rank must be declared before roots");
        if (first == "x0") {
            Vec v;
            double c;
            while (ls >> c) v.push_back(c);
            if (static_cast<int>(v.size()) != rank) fail("x0 has wrong dimension");
            x0 = std::move(v);
            continue;
        }
        int m = 0;
        try {
            m = std::stoi(first);
        } catch (...) {
            fail("expected multiplicity or keyword");
        }
        Vec root;
        double c;
        while (ls >> c) root.push_back(c);
        if (static_cast<int>(root.size()) != rank) fail("root has wrong dimension");
        roots.push_back(std::move(root));
        mults.push_back(m);
    }
    if (roots.empty()) throw std::invalid_argument("roots file: no roots");
    RootsFile out{checked ? RootSystemData::make(std::move(roots), std::move(mults))
                          : RootSystemData::make_unchecked(std::move(roots), std::move(mults)),
                  std::move(x0)};
    return out;
}

inline RootsFile read_roots_file(const std::string& path, bool checked = true) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open roots file: " + path);
    return read_roots_file(in, checked);
}

inline void write_roots_file(std::ostream& out, const RootSystemData& rs,
                             const std::optional<Vec>& x0 = std::nullopt) {
    out << "rank " << rs.rank() << "\n";
    for (int i = 0; i < rs.root_count(); ++i) {
        out << rs.multiplicities()[i];
        for (double c : rs.roots()[i]) out << " " << format_g17(c);
        out << "\n";
    }
    if (x0) {
        out << "x0";
        for (double c : *x0) out << " " << format_g17(c);
        out << "\n";
    }
}

inline nlohmann::json to_json(const Termination& term) {
    nlohmann::json j;
    j["reason"] = to_string(term.reason);
    if (term.reason == Termination::Reason::collapsed) {
        j["t_hit"] = term.t_hit;
        j["wall_index"] = term.wall_index;
    }
    if (term.reason == Termination::Reason::converged_to_fixed_point)
        j["fixed_point"] = term.fixed_point;
    if (!term.detail.empty()) j["detail"] = term.detail;
    return j;
}

inline nlohmann::json to_json(const RootSystemData& rs) {
    nlohmann::json j;
    j["rank"] = rs.rank();
    j["dimension"] = rs.dimension();
    j["multiplicities"] = rs.multiplicities();
    j["roots"] = rs.roots();
    return j;
}

}  // namespace isoflow::io
