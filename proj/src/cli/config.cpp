#include "cli/config.hpp"

#include <algorithm>

#include "cli/io.hpp"
#include "wclt/errors.hpp"
#include "wclt/finite_chain.hpp"

namespace wclt::cli {

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& context) {
    if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(context + ": unknown key \"" + key + "\"");
        }
    }
}

void require_present(const json& obj, const std::string& key, const std::string& context) {
    if (!obj.contains(key)) throw ConfigError(context + ": missing required key \"" + key + "\"");
}

double get_number(const json& obj, const std::string& key, const std::string& context) {
    require_present(obj, key, context);
    if (!obj[key].is_number()) throw ConfigError(context + ": \"" + key + "\" must be a number");
    return obj[key].get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& key, const std::string& context) {
    require_present(obj, key, context);
    if (!obj[key].is_number_integer()) {
        throw ConfigError(context + ": \"" + key + "\" must be an integer");
    }
    return obj[key].get<std::int64_t>();
}

Eigen::MatrixXd parse_matrix(const json& value, const std::string& context) {
    if (!value.is_array() || value.empty()) {
        throw ConfigError(context + ": expected a non-empty array of rows");
    }
    const std::size_t rows = value.size();
    if (!value[0].is_array() || value[0].empty()) {
        throw ConfigError(context + ": expected rows to be arrays");
    }
    const std::size_t cols = value[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!value[i].is_array() || value[i].size() != cols) {
            throw ConfigError(context + ": ragged matrix");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            if (!value[i][j].is_number()) throw ConfigError(context + ": non-numeric entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                value[i][j].get<double>();
        }
    }
    return m;
}

Eigen::VectorXd parse_vector(const json& value, const std::string& context) {
    if (!value.is_array() || value.empty()) {
        throw ConfigError(context + ": expected a non-empty numeric array");
    }
    Eigen::VectorXd v(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) throw ConfigError(context + ": non-numeric entry");
        v(static_cast<Eigen::Index>(i)) = value[i].get<double>();
    }
    return v;
}

namespace {

SSpec parse_s_spec(const json& s, const std::string& context) {
    require_present(s, "kind", context);
    const std::string kind = s["kind"].get<std::string>();
    if (kind == "neg-sin") {
        require_keys(s, {"kind"}, context);
        return SSpec::neg_sin();
    }
    if (kind == "affine-cap") {
        require_keys(s, {"kind", "slope", "cap"}, context);
        return SSpec::affine_cap(get_number(s, "slope", context), get_number(s, "cap", context));
    }
    if (kind == "table") {
        require_keys(s, {"kind", "xs", "ys"}, context);
        require_present(s, "xs", context);
        require_present(s, "ys", context);
        const Eigen::VectorXd xs = parse_vector(s["xs"], context);
        const Eigen::VectorXd ys = parse_vector(s["ys"], context);
        return SSpec::bounded_table(std::vector<double>(xs.data(), xs.data() + xs.size()),
                                    std::vector<double>(ys.data(), ys.data() + ys.size()));
    }
    throw ConfigError(context + ": unknown nonlinearity kind \"" + kind + "\"");
}

NoiseSpec parse_noise(const json& n, const std::string& context) {
    require_present(n, "kind", context);
    const std::string kind = n["kind"].get<std::string>();
    if (kind == "gaussian") {
        require_keys(n, {"kind", "sigma"}, context);
        return NoiseSpec::gaussian(get_number(n, "sigma", context));
    }
    if (kind == "uniform") {
        require_keys(n, {"kind", "half_width"}, context);
        return NoiseSpec::symmetric_uniform(get_number(n, "half_width", context));
    }
    if (kind == "bernoulli-pair") {
        require_keys(n, {"kind", "c"}, context);
        return NoiseSpec::bernoulli_pair(get_number(n, "c", context));
    }
    throw ConfigError(context + ": unknown noise kind \"" + kind + "\"");
}

FunctionSpec parse_function_spec(const json& f, const std::string& context) {
    require_present(f, "kind", context);
    const std::string kind = f["kind"].get<std::string>();
    if (kind == "zero") {
        require_keys(f, {"kind"}, context);
        return FunctionSpec::zero();
    }
    if (kind == "quadratic") {
        require_keys(f, {"kind", "C", "d"}, context);
        require_present(f, "C", context);
        require_present(f, "d", context);
        return FunctionSpec::quadratic(parse_matrix(f["C"], context),
                                       parse_vector(f["d"], context));
    }
    if (kind == "radial-power") {
        require_keys(f, {"kind", "lambda1", "delta", "beta"}, context);
        return FunctionSpec::radial_power(get_number(f, "lambda1", context),
                                          get_number(f, "delta", context),
                                          get_number(f, "beta", context));
    }
    throw ConfigError(context + ": unknown function kind \"" + kind + "\"");
}

} // namespace

ChainSpec parse_chain(const json& chain, const std::string& context) {
    require_present(chain, "family", context);
    const std::string family = chain["family"].get<std::string>();
    ChainSpec spec;
    if (family == "bernoulli-ar1") {
        require_keys(chain, {"family", "a"}, context);
        BernoulliAr1Params p(get_number(chain, "a", context));
        spec.kernel = make_bernoulli_ar1_kernel(p);
        spec.family = Family::bernoulli_ar1;
        spec.domain_lo = 0.0;
        spec.domain_hi = 1.0;
        return spec;
    }
    if (family == "nar") {
        require_keys(chain, {"family", "a", "s", "noise"}, context);
        require_present(chain, "s", context);
        require_present(chain, "noise", context);
        NarParams p(get_number(chain, "a", context), parse_s_spec(chain["s"], context + ".s"),
                    parse_noise(chain["noise"], context + ".noise"));
        spec.nar = p;
        spec.kernel = make_nar_kernel(std::move(p));
        spec.family = Family::nar;
        return spec;
    }
    if (family == "ula") {
        require_keys(chain, {"family", "h", "target"}, context);
        require_present(chain, "target", context);
        const json& target = chain["target"];
        require_present(target, "kind", context + ".target");
        const std::string kind = target["kind"].get<std::string>();
        const double h = get_number(chain, "h", context);
        if (!(h > 0.0)) throw ConfigError(context + ": step size h must be > 0");
        if (kind == "quadratic") {
            require_keys(target, {"kind", "A"}, context + ".target");
            require_present(target, "A", context + ".target");
            UlaParams p(QuadraticTarget{parse_matrix(target["A"], context + ".target.A")}, h);
            spec.ula = p;
            spec.kernel = make_ula_kernel(std::move(p));
        } else if (kind == "logistic") {
            require_keys(target, {"kind", "X", "y", "G"}, context + ".target");
            require_present(target, "X", context + ".target");
            require_present(target, "y", context + ".target");
            require_present(target, "G", context + ".target");
            UlaParams p(LogisticTarget{parse_matrix(target["X"], context + ".target.X"),
                                       parse_vector(target["y"], context + ".target.y"),
                                       parse_matrix(target["G"], context + ".target.G")},
                        h);
            spec.ula = p;
            spec.kernel = make_ula_kernel(std::move(p));
        } else {
            throw ConfigError(context + ": unknown ULA target \"" + kind + "\"");
        }
        spec.family = Family::ula;
        return spec;
    }
    if (family == "ei-mala") {
        if (chain.contains("bayes_inverse")) {
            require_keys(chain, {"family", "h", "bayes_inverse"}, context);
            const json& b = chain["bayes_inverse"];
            require_keys(b, {"lambda1", "lambda2", "delta", "beta", "A", "b"},
                         context + ".bayes_inverse");
            require_present(b, "A", context + ".bayes_inverse");
            require_present(b, "b", context + ".bayes_inverse");
            EiMalaParams p = make_bayes_inverse_eimala(
                get_number(b, "lambda1", context), get_number(b, "lambda2", context),
                get_number(b, "delta", context), get_number(b, "beta", context),
                parse_matrix(b["A"], context + ".bayes_inverse.A"),
                parse_vector(b["b"], context + ".bayes_inverse.b"),
                get_number(chain, "h", context));
            spec.kernel = make_eimala_kernel(std::move(p));
        } else {
            require_keys(chain, {"family", "h", "H", "gamma", "Gamma"}, context);
            require_present(chain, "H", context);
            require_present(chain, "gamma", context);
            require_present(chain, "Gamma", context);
            EiMalaParams p(parse_matrix(chain["H"], context + ".H"),
                           parse_function_spec(chain["gamma"], context + ".gamma"),
                           parse_function_spec(chain["Gamma"], context + ".Gamma"),
                           get_number(chain, "h", context));
            spec.kernel = make_eimala_kernel(std::move(p));
        }
        spec.family = Family::ei_mala;
        return spec;
    }
    if (family == "finite") {
        Eigen::MatrixXd P;
        if (chain.contains("matrix_csv")) {
            require_keys(chain, {"family", "matrix_csv"}, context);
            P = read_csv_matrix(chain["matrix_csv"].get<std::string>());
        } else {
            require_keys(chain, {"family", "P"}, context);
            require_present(chain, "P", context);
            P = parse_matrix(chain["P"], context + ".P");
        }
        spec.finite = FiniteChain::from_matrix(std::move(P));
        spec.kernel = make_finite_kernel(spec.finite);
        spec.family = Family::finite;
        spec.domain_lo = 0.0;
        spec.domain_hi = static_cast<double>(spec.finite->n_states() - 1);
        return spec;
    }
    throw ConfigError(context + ": unknown chain family \"" + family + "\"");
}

Metric parse_metric(const json& value, const std::string& context) {
    require_present(value, "kind", context);
    const std::string kind = value["kind"].get<std::string>();
    if (kind == "euclidean") {
        require_keys(value, {"kind"}, context);
        return Metric::euclidean();
    }
    if (kind == "discrete") {
        require_keys(value, {"kind"}, context);
        return Metric::discrete();
    }
    if (kind == "bounded-euclidean") {
        require_keys(value, {"kind", "cap"}, context);
        return Metric::bounded_euclidean(get_number(value, "cap", context));
    }
    throw ConfigError(context + ": unknown metric kind \"" + kind + "\"");
}

TestFunction parse_test_function(const json& value, const std::string& context) {
    require_present(value, "kind", context);
    const std::string kind = value["kind"].get<std::string>();
    if (kind == "coordinate") {
        require_keys(value, {"kind", "index", "center"}, context);
        const std::int64_t index = get_integer(value, "index", context);
        if (index < 0) throw ConfigError(context + ": index must be >= 0");
        return TestFunction::coordinate(static_cast<std::size_t>(index),
                                        get_number(value, "center", context));
    }
    if (kind == "table") {
        require_keys(value, {"kind", "xs", "ys"}, context);
        require_present(value, "xs", context);
        require_present(value, "ys", context);
        const Eigen::VectorXd xs = parse_vector(value["xs"], context);
        const Eigen::VectorXd ys = parse_vector(value["ys"], context);
        return TestFunction::table(std::vector<double>(xs.data(), xs.data() + xs.size()),
                                   std::vector<double>(ys.data(), ys.data() + ys.size()));
    }
    if (kind == "smoothed-indicator") {
        require_keys(value, {"kind", "lo", "hi"}, context);
        return TestFunction::smoothed_indicator(get_number(value, "lo", context),
                                                get_number(value, "hi", context));
    }
    throw ConfigError(context + ": unknown test function kind \"" + kind + "\"");
}

State parse_state(const json& value, std::size_t dimension, const std::string& context) {
    std::vector<double> coords;
    if (value.is_number()) {
        coords.push_back(value.get<double>());
    } else {
        const Eigen::VectorXd v = parse_vector(value, context);
        coords.assign(v.data(), v.data() + v.size());
    }
    if (coords.size() != dimension) {
        throw ConfigError(context + ": state dimension does not match the chain");
    }
    return State(std::move(coords));
}

std::string config_hash(const json& config) { return fnv1a64_hex(config.dump()); }

} // namespace wclt::cli
