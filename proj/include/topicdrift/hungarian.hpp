#pragma once

#include <limits>
#include <vector>

#include "topicdrift/matrix.hpp"

namespace topicdrift {

/// Kuhn-Munkres assignment on a square cost matrix (shortest augmenting path,
/// O(n^3)). Returns assignment[row] = column; total cost in *total_cost when
/// given.
inline std::vector<int> min_cost_assignment(const DenseMatrix& cost, double* total_cost = nullptr) {
    const int n = static_cast<int>(cost.rows());
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> min_slack(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < min_slack[j]) {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (match[j]) assignment[match[j] - 1] = j - 1;
    }
    if (total_cost) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += cost(i, assignment[i]);
        *total_cost = total;
    }
    return assignment;
}

}  // namespace topicdrift
