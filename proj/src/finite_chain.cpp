#include "wclt/finite_chain.hpp"

#include <cmath>
#include <vector>

namespace wclt {

namespace {

// Closed communicating classes of the directed graph on positive entries.
// Tarjan SCCs, then count components with no edge leaving them.
int count_recurrent_classes(const Eigen::MatrixXd& P) {
    const int n = static_cast<int>(P.rows());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0, n_comp = 0;

    // Iterative Tarjan to avoid recursion limits on larger chains.
    struct Frame {
        int v;
        int next_child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            const int v = f.v;
            bool descended = false;
            for (int w = f.next_child; w < n; ++w) {
                if (P(v, w) <= 0.0) continue;
                if (index[w] == -1) {
                    f.next_child = w + 1;
                    frames.push_back({w, 0});
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                while (true) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                    if (w == v) break;
                }
                ++n_comp;
            }
            frames.pop_back();
            if (!frames.empty()) {
                const int parent = frames.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }

    std::vector<bool> closed(n_comp, true);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (P(i, j) > 0.0 && comp[i] != comp[j]) closed[comp[i]] = false;
        }
    }
    int recurrent = 0;
    for (bool c : closed) recurrent += c ? 1 : 0;
    return recurrent;
}

void validate_row_stochastic(const Eigen::MatrixXd& P) {
    if (P.rows() != P.cols() || P.rows() < 1) {
        throw ConfigError("transition matrix must be square and non-empty");
    }
    for (int i = 0; i < P.rows(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < P.cols(); ++j) {
            const double v = P(i, j);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw ConfigError("transition matrix entries must be finite and >= 0");
            }
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-12) {
            throw ConfigError("transition matrix row does not sum to 1 within 1e-12");
        }
    }
}

Eigen::VectorXd stationary_lu(const Eigen::MatrixXd& P) {
    const int n = static_cast<int>(P.rows());
    // (P' - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
    A.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd pi = A.partialPivLu().solve(b);
    return pi;
}

Eigen::VectorXd stationary_power(const Eigen::MatrixXd& P) {
    const int n = static_cast<int>(P.rows());
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd next = P.transpose() * pi;
        next /= next.sum();
        const double diff = (next - pi).cwiseAbs().maxCoeff();
        pi = next;
        if (diff <= 1e-15) break;
    }
    return pi;
}

} // namespace

Eigen::VectorXd finite_stationary(const Eigen::MatrixXd& P) {
    validate_row_stochastic(P);
    if (count_recurrent_classes(P) != 1) {
        throw ConfigError("non-unique invariant distribution");
    }
    Eigen::VectorXd pi = P.rows() <= 1000 ? stationary_lu(P) : stationary_power(P);
    // Clean tiny negative round-off and renormalize.
    for (int i = 0; i < pi.size(); ++i) {
        if (pi(i) < 0.0 && pi(i) > -1e-13) pi(i) = 0.0;
    }
    pi /= pi.sum();
    const double residual = (P.transpose() * pi - pi).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-12)) {
        throw NumericError("stationary solve residual above 1e-12");
    }
    return pi;
}

int finite_row_sample(const Eigen::MatrixXd& P, int row, double u) {
    double cum = 0.0;
    const int n = static_cast<int>(P.cols());
    for (int j = 0; j < n; ++j) {
        cum += P(row, j);
        if (u < cum) return j;
    }
    return n - 1;
}

FiniteChain::FiniteChain(Eigen::MatrixXd P, Eigen::VectorXd pi)
    : P_(std::move(P)), pi_(std::move(pi)) {
    validate_row_stochastic(P_);
    if (pi_.size() != P_.rows()) throw ConfigError("pi length must match matrix size");
    double sum = 0.0;
    for (int i = 0; i < pi_.size(); ++i) {
        if (!(pi_(i) >= 0.0)) throw ConfigError("pi entries must be >= 0");
        sum += pi_(i);
    }
    if (std::fabs(sum - 1.0) > 1e-10) throw ConfigError("pi must sum to 1");
    const double residual = (P_.transpose() * pi_ - pi_).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-10)) {
        throw ConfigError("pi P = pi violated beyond 1e-10");
    }
}

std::shared_ptr<const FiniteChain> FiniteChain::from_matrix(Eigen::MatrixXd P) {
    Eigen::VectorXd pi = finite_stationary(P);
    return std::make_shared<const FiniteChain>(std::move(P), std::move(pi));
}

Eigen::VectorXd FiniteChain::apply(const Eigen::VectorXd& g) const {
    if (g.size() != P_.rows()) throw ConfigError("finite_apply: vector length mismatch");
    return P_ * g;
}

double FiniteChain::pi_norm(const Eigen::VectorXd& g) const {
    double sum = 0.0;
    for (int i = 0; i < g.size(); ++i) sum += pi_(i) * g(i) * g(i);
    return std::sqrt(sum);
}

} // namespace wclt
