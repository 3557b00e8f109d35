#include "gammacalc/json_io.hpp"

namespace gammacalc {

using nlohmann::json;

json errored_to_json(const ErroredVector& ev) {
    json j;
    j["value"] = std::vector<double>(ev.value.begin(), ev.value.end());
    std::vector<std::vector<double>> var;
    for (Eigen::Index r = 0; r < ev.variance.rows(); ++r) {
        var.emplace_back(ev.variance.row(r).begin(), ev.variance.row(r).end());
    }
    j["variance"] = var;
    j["bias"] = std::vector<double>(ev.bias.begin(), ev.bias.end());
    return j;
}

ErroredVector errored_from_json(const json& j, const ToleranceConfig& tol) {
    try {
        const auto value = j.at("value").get<std::vector<double>>();
        const auto var_rows = j.at("variance").get<std::vector<std::vector<double>>>();
        std::vector<double> bias(value.size(), 0.0);
        if (j.contains("bias")) bias = j.at("bias").get<std::vector<double>>();

        const int d = static_cast<int>(value.size());
        if (static_cast<int>(var_rows.size()) != d) throw InputError("errored vector: variance row count != dimension");
        Eigen::MatrixXd variance(d, d);
        for (int r = 0; r < d; ++r) {
            if (static_cast<int>(var_rows[static_cast<std::size_t>(r)].size()) != d)
                throw InputError("errored vector: variance is not square");
            for (int c = 0; c < d; ++c) variance(r, c) = var_rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(value.data(), d);
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size()));
        return make_errored(std::move(v), std::move(variance), std::move(b), tol);
    } catch (const json::exception& e) {
        throw InputError(std::string("errored vector JSON: ") + e.what());
    }
}

ErroredVector errored_from_json_text(const std::string& text, const ToleranceConfig& tol) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError("errored vector JSON: malformed document");
    return errored_from_json(j, tol);
}

} // namespace gammacalc
