#pragma once

#include <functional>
#include <vector>

#include "levy/common.hpp"

namespace levy {

/// Laplace inversion scheme on the positive real axis.
struct GaverScheme {
    enum class Mode { PlainGS, GWR };
    /// GWR column policy: PaperDepth takes the deepest even rho column of an
    /// M-functional table (the classical GWR(M) output); Adaptive scans deeper
    /// tables for the first stabilized column, which is more accurate for
    /// transforms with well-behaved Gaver expansions
    enum class Depth { PaperDepth, Adaptive };
    Mode mode = Mode::GWR;
    Depth depth = Depth::Adaptive;
    int M = 8;        // plain-GS depth, also the GWR functional count for PaperDepth
    int N_wynn = 16;  // Gaver functionals for adaptive GWR (queries k=1..2*N_wynn)

    /// number of transform samples f~(k ln2 / T), k = 1..sample_count()
    int sample_count() const {
        if (mode == Mode::PlainGS) return 2 * M;
        return depth == Depth::PaperDepth ? 2 * M : 2 * N_wynn;
    }
};

/// Gaver-Stehfest coefficients zeta_1..zeta_2M, evaluated exactly in integer
/// arithmetic.  M <= 9 in double precision.
std::vector<double> gs_coefficients(int M);

/// Inversion from precomputed samples ft[k-1] = f~(k ln2 / T), k=1..sample_count().
/// degraded (optional) is set when the rho recursion hit an exact-zero division
/// and fell back to the deepest finite column.
double invert_from_samples(const std::vector<long double>& ft, double T,
                           const GaverScheme& scheme, bool* degraded = nullptr);
double invert_from_samples(const std::vector<double>& ft, double T, const GaverScheme& scheme,
                           bool* degraded = nullptr);

double invert(const std::function<double(double)>& ft, double T, const GaverScheme& scheme = {},
              bool* degraded = nullptr);
double invert_ld(const std::function<long double(long double)>& ft, double T,
                 const GaverScheme& scheme = {}, bool* degraded = nullptr);

}  // namespace levy
