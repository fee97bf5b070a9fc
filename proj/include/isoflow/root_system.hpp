#pragma once

// Coxeter-chamber data of an isoparametric submanifold: positive unit roots
// alpha_i with multiplicities m_i in the normal space R^k, and the open
// chamber C = { x : <x, alpha_i> > 0 for all i }. The curvature normals at a
// chamber point x are -alpha_i / <x, alpha_i>.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoflow/linalg.hpp"

namespace isoflow {

inline constexpr double kUnitNormTol = 1e-12;
inline constexpr double kAngularDistinctTol = 1e-9;

struct ValidationReport {
    bool unit_norm_ok = true;
    bool distinct_ok = true;
    bool full_ok = true;
    std::vector<std::string> messages;

    bool passed() const { return unit_norm_ok && distinct_ok && full_ok; }
};

class RootSystemData {
public:
    // Checked general-rank constructor: roots are normalized (zero vectors
    // rejected), pairwise distinctness and spanning are enforced.
    static RootSystemData make(std::vector<Vec> roots, std::vector<int> multiplicities) {
        RootSystemData rs = assemble(std::move(roots), std::move(multiplicities), true);
        ValidationReport rep = rs.validate();
        if (!rep.passed()) {
            std::string msg = "root system invalid:";
            for (const auto& m : rep.messages) msg += " " + m;
            throw std::invalid_argument(msg);
        }
        return rs;
    }

    // Stores the data exactly as given. Intended for exploratory or
    // deliberately corrupted inputs; validate() still reports honestly.
    static RootSystemData make_unchecked(std::vector<Vec> roots, std::vector<int> multiplicities) {
        return assemble(std::move(roots), std::move(multiplicities), false);
    }

    // Dihedral rank-2 system: roots alpha_k = e^{i theta_k}, theta_k = k pi/g - pi/2,
    // k = 1..g, multiplicities alternating (m1 for odd k, m2 for even k).
    // Enforces the multiplicity rules: g in {1,2,3,4,6}; m1 = m2 when g is odd;
    // m1 = m2 in {1,2} when g = 6; m1 <= m2.
    static RootSystemData dihedral(int g, int m1, int m2) {
        check_dihedral_rules(g, m1, m2);
        return dihedral_unchecked(g, m1, m2);
    }

    // Same geometry, skipping the multiplicity rules (type invariants of the
    // root list still hold by construction).
    static RootSystemData dihedral_unchecked(int g, int m1, int m2) {
        if (g < 1) throw std::invalid_argument("dihedral: g must be positive");
        if (m1 < 1 || m2 < 1) throw std::invalid_argument("dihedral: multiplicities must be positive");
        std::vector<Vec> roots;
        std::vector<int> mults;
        for (int k = 1; k <= g; ++k) {
            double theta_k = k * std::numbers::pi / g - std::numbers::pi / 2.0;
            roots.push_back(Vec{std::cos(theta_k), std::sin(theta_k)});
            mults.push_back(k % 2 == 1 ? m1 : m2);
        }
        RootSystemData rs = assemble(std::move(roots), std::move(mults), false);
        rs.dihedral_g_ = g;
        return rs;
    }

    int rank() const { return rank_; }
    int root_count() const { return static_cast<int>(roots_.size()); }
    const std::vector<Vec>& roots() const { return roots_; }
    const std::vector<int>& multiplicities() const { return mults_; }
    int dimension() const { return dimension_; }  // n = sum of multiplicities

    // g of the dihedral constructor, if this instance came from it.
    std::optional<int> dihedral_g() const { return dihedral_g_; }

    // Chamber membership. Returns (inside, margin) with margin = min_i <x, alpha_i>.
    std::pair<bool, double> in_chamber(const Vec& x) const {
        if (static_cast<int>(x.size()) != rank_)
            throw std::invalid_argument("in_chamber: point dimension != rank");
        double margin = std::numeric_limits<double>::infinity();
        for (const auto& a : roots_) margin = std::min(margin, dot(x, a));
        return {margin > 0.0, margin};
    }

    double margin(const Vec& x) const { return in_chamber(x).second; }

    // Index of the wall closest to x (argmin of <x, alpha_i>).
    int nearest_wall(const Vec& x) const {
        int idx = 0;
        double best = dot(x, roots_[0]);
        for (int i = 1; i < root_count(); ++i) {
            double v = dot(x, roots_[i]);
            if (v < best) { best = v; idx = i; }
        }
        return idx;
    }

    ValidationReport validate() const {
        ValidationReport rep;
        for (int i = 0; i < root_count(); ++i) {
            double n = norm(roots_[i]);
            if (std::abs(n - 1.0) > kUnitNormTol) {
                rep.unit_norm_ok = false;
                std::ostringstream os;
                os << "root " << i << " has norm " << n << " (not unit)";
                rep.messages.push_back(os.str());
            }
        }
        for (int i = 0; i < root_count(); ++i) {
            for (int j = i + 1; j < root_count(); ++j) {
                double c = dot(roots_[i], roots_[j]) / (norm(roots_[i]) * norm(roots_[j]));
                double ang = std::acos(std::clamp(c, -1.0, 1.0));
                if (ang < kAngularDistinctTol) {
                    rep.distinct_ok = false;
                    std::ostringstream os;
                    os << "roots " << i << " and " << j << " coincide (angle " << ang << ")";
                    rep.messages.push_back(os.str());
                }
            }
        }
        // Fullness: the convergence argument toward the minimal submanifold
        // needs the roots to span the normal space. The g = 1 dihedral family
        // (hypersphere, one root) genuinely spans only a line; it is reported
        // here as non-full like any other input.
        if (numerical_rank(roots_) != static_cast<std::size_t>(rank_)) {
            rep.full_ok = false;
            std::ostringstream os;
            os << "roots span a " << numerical_rank(roots_) << "-dimensional subspace of R^" << rank_;
            rep.messages.push_back(os.str());
        }
        return rep;
    }

private:
    static void check_dihedral_rules(int g, int m1, int m2) {
        if (g != 1 && g != 2 && g != 3 && g != 4 && g != 6)
            throw std::invalid_argument("dihedral: g must be one of {1,2,3,4,6} (Munzner)");
        if (m1 < 1 || m2 < 1)
            throw std::invalid_argument("dihedral: multiplicities must be positive");
        if (m1 > m2)
            throw std::invalid_argument("dihedral: require m1 <= m2 (focal dimension convention)");
        if ((g == 1 || g == 3) && m1 != m2)
            throw std::invalid_argument("dihedral: odd g forces m1 = m2 (Munzner m_i = m_{i+2})");
        if (g == 6 && !(m1 == m2 && (m1 == 1 || m1 == 2)))
            throw std::invalid_argument("dihedral: g = 6 requires m1 = m2 in {1,2} (Abresch)");
    }

    static RootSystemData assemble(std::vector<Vec> roots, std::vector<int> mults, bool normalize) {
        if (roots.empty()) throw std::invalid_argument("root system: no roots");
        if (roots.size() != mults.size())
            throw std::invalid_argument("root system: roots/multiplicities size mismatch");
        RootSystemData rs;
        rs.rank_ = static_cast<int>(roots[0].size());
        if (rs.rank_ < 1) throw std::invalid_argument("root system: rank must be positive");
        for (auto& r : roots) {
            if (static_cast<int>(r.size()) != rs.rank_)
                throw std::invalid_argument("root system: inconsistent root dimensions");
            if (normalize) r = normalized(r, 1e-300);
        }
        for (int m : mults)
            if (m < 1 && normalize) throw std::invalid_argument("root system: multiplicities must be positive");
        rs.roots_ = std::move(roots);
        rs.mults_ = std::move(mults);
        rs.dimension_ = 0;
        for (int m : rs.mults_) rs.dimension_ += m;
        return rs;
    }

    int rank_ = 0;
    std::vector<Vec> roots_;
    std::vector<int> mults_;
    int dimension_ = 0;
    std::optional<int> dihedral_g_;
};

// A point of the open chamber; construction records the (positive) margin.
struct ChamberPoint {
    Vec coords;
    double margin = 0.0;

    ChamberPoint() = default;
    ChamberPoint(const RootSystemData& rs, Vec x) : coords(std::move(x)) {
        auto [inside, m] = rs.in_chamber(coords);
        margin = m;
        if (!inside) {
            std::ostringstream os;
            os << "point outside the chamber (margin " << m << ")";
            throw std::invalid_argument(os.str());
        }
    }
};

// Polar coordinates on the dihedral rank-2 chamber sector (0, pi/g).
inline std::pair<double, double> polar(const RootSystemData& rs, const Vec& x) {
    if (rs.rank() != 2) throw std::invalid_argument("polar: rank-2 systems only");
    const int g = rs.dihedral_g() ? *rs.dihedral_g() : rs.root_count();
    double r = norm(x);
    if (r <= 0.0) throw std::invalid_argument("polar: zero point");
    double theta = std::atan2(x[1], x[0]);
    if (!(theta > 0.0 && theta < std::numbers::pi / g)) {
        std::ostringstream os;
        os << "polar: angle " << theta << " outside the open sector (0, pi/" << g << ")";
        throw std::domain_error(os.str());
    }
    return {r, theta};
}

inline Vec from_polar(double r, double theta) {
    return Vec{r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace isoflow
