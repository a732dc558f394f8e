#pragma once

#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wclt/clt.hpp"
#include "wclt/kernels.hpp"
#include "wclt/state.hpp"

namespace wclt::cli {

using nlohmann::json;

// Schema checks: every object is validated against an explicit key set, so
// unknown keys are rejected ("schema": 1 is required at the top level).
void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& context);
void require_present(const json& obj, const std::string& key, const std::string& context);

double get_number(const json& obj, const std::string& key, const std::string& context);
std::int64_t get_integer(const json& obj, const std::string& key, const std::string& context);

Eigen::MatrixXd parse_matrix(const json& value, const std::string& context);
Eigen::VectorXd parse_vector(const json& value, const std::string& context);

struct ChainSpec {
    std::shared_ptr<const Kernel> kernel;
    Family family = Family::bernoulli_ar1;
    // Native domain for default start-pair lattices (d = 1 families).
    double domain_lo = -5.0, domain_hi = 5.0;
    std::optional<NarParams> nar;       // kept for the condition checker
    std::optional<UlaParams> ula;       // kept for the condition checker
    std::shared_ptr<const FiniteChain> finite;
};

ChainSpec parse_chain(const json& chain, const std::string& context);

Metric parse_metric(const json& value, const std::string& context);
TestFunction parse_test_function(const json& value, const std::string& context);
State parse_state(const json& value, std::size_t dimension, const std::string& context);

// Canonical hash of the effective config (after CLI overrides).
std::string config_hash(const json& config);

} // namespace wclt::cli
