#include "altphase/random.hpp"

namespace altphase {

std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters) noexcept {
    std::uint64_t h = mix64(master);
    for (std::uint64_t c : counters) {
        h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    }
    return h;
}

Complex standard_complex_normal(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

ComplexVector standard_complex_normal(Rng& rng, Eigen::Index n) {
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = standard_complex_normal(rng);
    return v;
}

ComplexMatrix standard_complex_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix a(rows, cols);
    // column by column so that column j depends only on the draws before it
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = standard_complex_normal(rng);
    return a;
}

ComplexVector uniform_unit_sphere(Rng& rng, Eigen::Index n) {
    ComplexVector v = standard_complex_normal(rng, n);
    double norm = v.norm();
    while (norm == 0.0) {
        v = standard_complex_normal(rng, n);
        norm = v.norm();
    }
    return v / norm;
}

}  // namespace altphase
