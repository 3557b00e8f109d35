#include "gammacalc/structures/json.hpp"

namespace gammacalc::structures {

using nlohmann::json;

namespace {

std::vector<std::string> coordinate_names(int d) {
    std::vector<std::string> names;
    for (int i = 1; i <= d; ++i) names.push_back("x" + std::to_string(i));
    return names;
}

ErrorStructure lebesgue_from_json(const json& spec) {
    Box box;
    for (const auto& side : spec.at("domain")) box.sides.emplace_back(side.at(0).get<double>(), side.at(1).get<double>());
    const int d = box.dim();
    const json& a = spec.at("a");
    if (a.empty()) throw InputError("lebesgue: empty coefficient field");
    if (a[0].size() && a[0][0].is_number()) {
        Eigen::MatrixXd m(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) m(r, c) = a.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
        return lebesgue_field(box, [m](const Eigen::VectorXd&) { return m; });
    }
    // entries given as expressions over x1..xd
    const auto names = coordinate_names(d);
    std::vector<std::vector<expr::ExprAst>> entries;
    for (int r = 0; r < d; ++r) {
        std::vector<expr::ExprAst> row;
        for (int c = 0; c < d; ++c)
            row.push_back(expr::parse(a.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<std::string>(), names));
        entries.push_back(std::move(row));
    }
    return lebesgue_field(box, [entries, d](const Eigen::VectorXd& x) {
        Eigen::MatrixXd m(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) m(r, c) = expr::evaluate(entries[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], x);
        return m;
    });
}

} // namespace

ErrorStructure structure_from_json(const json& spec) {
    try {
        const std::string kind = spec.at("kind").get<std::string>();
        if (kind == "ou1d") return ou_1d();
        if (kind == "lebesgue") return lebesgue_from_json(spec);
        if (kind == "product") {
            if (spec.value("countable", false)) return product_structure_countable(structure_from_json(spec.at("factor")));
            std::vector<ErrorStructure> factors;
            for (const auto& f : spec.at("factors")) factors.push_back(structure_from_json(f));
            return product_structure(std::move(factors));
        }
        if (kind == "image") {
            ErrorStructure base = structure_from_json(spec.at("base"));
            const int d_base = base.dimension();
            if (d_base < 0) throw InputError("image: countable base needs explicit coordinate lists");
            const auto names = coordinate_names(d_base);
            std::vector<Functional> comps;
            for (const auto& e : spec.at("map")) comps.push_back(functional_from_expression(expr::parse(e.get<std::string>(), names)));
            EstimatorConfig cfg;
            if (spec.contains("estimator")) {
                const json& est = spec["estimator"];
                cfg.n_train = est.value("n_train", cfg.n_train);
                cfg.train_seed = est.value("train_seed", cfg.train_seed);
                cfg.min_effective = est.value("min_effective", cfg.min_effective);
                cfg.bandwidth_scale = est.value("bandwidth_scale", cfg.bandwidth_scale);
                cfg.prefer_binning_1d = est.value("binning", cfg.prefer_binning_1d);
            }
            return image_structure(base, std::move(comps), cfg);
        }
        throw InputError("unknown structure kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw InputError(std::string("structure JSON: ") + e.what());
    }
}

Measure1D measure_from_json(const json& spec) {
    try {
        Measure1D mu;
        if (spec.contains("atoms")) {
            for (const auto& a : spec["atoms"]) mu.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        }
        if (spec.contains("density_grid")) {
            const json& g = spec["density_grid"];
            mu.density.lo = g.at("lo").get<double>();
            mu.density.hi = g.at("hi").get<double>();
            mu.density.values = g.at("values").get<std::vector<double>>();
        }
        return mu;
    } catch (const json::exception& e) {
        throw InputError(std::string("measure JSON: ") + e.what());
    }
}

} // namespace gammacalc::structures
