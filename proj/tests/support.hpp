#pragma once

#include "extenso/models.hpp"

#include <random>

namespace extenso::test {

inline ScalarField field(std::string_view src, std::vector<std::string> vars,
                         const std::map<std::string, double>& constants = {}, Box domain = {})
{
    return ScalarField::parse(src, std::move(vars), constants, std::move(domain));
}

inline VectorField vfield(std::vector<std::string> comps, std::vector<std::string> vars, Box domain = {})
{
    return VectorField::parse(comps, std::move(vars), {}, std::move(domain));
}

inline const std::vector<std::string>& xy()
{
    static const std::vector<std::string> v{"x", "y"};
    return v;
}

inline const std::vector<std::string>& xyz()
{
    static const std::vector<std::string> v{"x", "y", "z"};
    return v;
}

inline constexpr MultiIndex bit(int slot) { return MultiIndex(1) << slot; }

inline Point random_point(std::mt19937_64& rng, int n, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    auto p = Point(std::size_t(n));
    for (double& x : p)
        x = u(rng);
    return p;
}

// L_X w at p from the coordinate formula
//   (L_X w)_I = X^j d_j w_I + sum_s w_{I with i_s -> j} d_{i_s} X^j,
// independent of the Cartan-based implementation.
inline FormValue lie_derivative_coordinates(const VectorField& x, const KForm& w, std::span<const double> p)
{
    const int n = w.dim(), k = w.degree();
    const FormValue value = w(p);
    const std::vector<double> xv = x(p);
    const Eigen::MatrixXd dx = x.jacobian(p); // dx(j, i) = d_i X^j
    // w evaluated on an arbitrary index tuple (antisymmetric extension).
    auto entry = [&](std::vector<int> idx) {
        int sign = 1;
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = 0; b + 1 < idx.size() - a; ++b)
                if (idx[b] > idx[b + 1]) {
                    std::swap(idx[b], idx[b + 1]);
                    sign = -sign;
                }
        MultiIndex I = 0;
        for (std::size_t a = 0; a < idx.size(); ++a) {
            if (a && idx[a] == idx[a - 1])
                return 0.0;
            I |= MultiIndex(1) << idx[a];
        }
        return sign * value[I];
    };
    FormValue out(n, k);
    for (MultiIndex I : multi_indices(n, k)) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (I & (MultiIndex(1) << i))
                idx.push_back(i);
        double v = 0.0;
        const Jet c = jet_of(w.coefficient(I), p, 1);
        for (int j = 0; j < n; ++j)
            v += xv[std::size_t(j)] * c.grad(j);
        for (std::size_t s = 0; s < idx.size(); ++s)
            for (int j = 0; j < n; ++j) {
                std::vector<int> swapped = idx;
                swapped[s] = j;
                v += entry(swapped) * dx(j, idx[s]);
            }
        out[I] = v;
    }
    return out;
}

inline Box cube(int n, double lo, double hi) { return Box(std::vector<Interval>(std::size_t(n), Interval{lo, hi})); }

} // namespace extenso::test
