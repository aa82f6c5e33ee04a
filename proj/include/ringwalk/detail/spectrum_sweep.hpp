#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "ringwalk/errors.hpp"

namespace ringwalk {

template <class MatrixAt>
SpectrumResult compute_spectrum_of(MatrixAt&& matrix_at, const MomentumGrid& grid, bool keep_vectors,
                                   unsigned threads) {
    grid.validate();
    SpectrumResult result;
    result.grid = grid;
    result.points = grid.points();
    const std::size_t n = result.points.size();
    result.bands.resize(n);
    if (keep_vectors) result.eigenvectors.resize(n);

    std::vector<std::exception_ptr> errors(n);
    auto work = [&](std::size_t i) {
        try {
            const CMatrix u = matrix_at(result.points[i]);
            if (keep_vectors) {
                UnitaryEigen eig = eigen_decompose_unitary(u);
                result.bands[i] = std::move(eig.phases);
                result.eigenvectors[i] = std::move(eig.vectors);
            } else {
                result.bands[i] = eigenphases(u);
            }
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    if (threads == 0) threads = sweep_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) work(i);
            });
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ContractViolation& e) {
            throw ContractViolation("momentum sample " + std::to_string(i) + ": " + e.what(), e.residual());
        }
    }
    return result;
}

}  // namespace ringwalk
