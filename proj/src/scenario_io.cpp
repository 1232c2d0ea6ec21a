#include "seqrar/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace seqrar {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ParseError(field + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) fail(ctx + key, "missing");
    return *it;
}

double num(const json& j, const std::string& ctx) {
    if (!j.is_number()) fail(ctx, "expected a number");
    return j.get<double>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    if (!j.is_object()) fail(ctx, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    ok.insert("notes");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) fail(ctx + it.key(), "unknown field");
}

ModelKind model_kind(const std::string& s, const std::string& ctx) {
    if (s == "normal") return ModelKind::Normal;
    if (s == "binary") return ModelKind::Binary;
    fail(ctx, "unknown model kind '" + s + "'");
}

AllocationKind allocation_kind(const std::string& s, const std::string& ctx) {
    if (s == "neyman_normal") return AllocationKind::NeymanNormal;
    if (s == "neyman_binary") return AllocationKind::NeymanBinary;
    if (s == "optimal") return AllocationKind::RSIHROptimal;
    if (s == "urn") return AllocationKind::Urn;
    if (s == "equal") return AllocationKind::FixedEqual;
    fail(ctx, "unknown allocation kind '" + s + "'");
}

DesignKind design_kind(const std::string& s, const std::string& ctx) {
    if (s == "dbcd") return DesignKind::DBCD;
    if (s == "cr") return DesignKind::CompleteRandomization;
    fail(ctx, "unknown design kind '" + s + "'");
}

SpendingKind spending_kind(const std::string& s, const std::string& ctx) {
    if (s == "obf") return SpendingKind::OBFLike;
    if (s == "linear") return SpendingKind::Linear;
    if (s == "pocock") return SpendingKind::PocockLike;
    if (s == "fixed") return SpendingKind::Fixed;
    fail(ctx, "unknown spending kind '" + s + "'");
}

ArmParams arm_params(const json& j, ModelKind kind, const std::string& ctx) {
    ArmParams a;
    if (kind == ModelKind::Normal) {
        check_keys(j, {"mean", "sd"}, ctx);
        a.mean = num(require(j, "mean", ctx), ctx + "mean");
        a.sd = num(require(j, "sd", ctx), ctx + "sd");
    } else {
        check_keys(j, {"p"}, ctx);
        a.p = num(require(j, "p", ctx), ctx + "p");
    }
    return a;
}

} // namespace

Scenario scenario_from_json(const json& j) {
    check_keys(j,
               {"scenario_id", "model", "design", "allocation", "schedule", "spending",
                "replications", "master_seed", "remaining_patient_policy", "test_estimator",
                "rho_report"},
               "");
    Scenario s;
    if (j.contains("scenario_id")) {
        if (!j["scenario_id"].is_string()) fail("scenario_id", "expected a string");
        s.id = j["scenario_id"].get<std::string>();
    }

    const json& jm = require(j, "model", "");
    check_keys(jm, {"kind", "arm1", "arm2"}, "model.");
    s.model.kind = model_kind(require(jm, "kind", "model.").get<std::string>(), "model.kind");
    s.model.arm1 = arm_params(require(jm, "arm1", "model."), s.model.kind, "model.arm1.");
    s.model.arm2 = arm_params(require(jm, "arm2", "model."), s.model.kind, "model.arm2.");

    const json& jd = require(j, "design", "");
    check_keys(jd, {"kind", "gamma", "burn_in_per_arm", "prior_center"}, "design.");
    s.design.kind = design_kind(require(jd, "kind", "design.").get<std::string>(), "design.kind");
    if (s.design.kind == DesignKind::DBCD) {
        s.design.gamma = num(require(jd, "gamma", "design."), "design.gamma");
        const json& jb = require(jd, "burn_in_per_arm", "design.");
        if (!jb.is_number_integer()) fail("design.burn_in_per_arm", "expected an integer");
        s.design.burn_in_per_arm = jb.get<int>();
    }
    if (jd.contains("prior_center"))
        s.design.prior_center = num(jd["prior_center"], "design.prior_center");

    const json& ja = require(j, "allocation", "");
    check_keys(ja, {"kind"}, "allocation.");
    s.allocation.kind =
        allocation_kind(require(ja, "kind", "allocation.").get<std::string>(), "allocation.kind");

    const json& js = require(j, "schedule", "");
    check_keys(js, {"look_sizes"}, "schedule.");
    const json& jl = require(js, "look_sizes", "schedule.");
    if (!jl.is_array() || jl.empty()) fail("schedule.look_sizes", "expected a non-empty array");
    for (const auto& v : jl) {
        if (!v.is_number_integer()) fail("schedule.look_sizes", "expected integers");
        s.schedule.look_sizes.push_back(v.get<int>());
    }

    const json& jp = require(j, "spending", "");
    check_keys(jp, {"kind", "total_alpha", "values", "label"}, "spending.");
    s.spending.kind =
        spending_kind(require(jp, "kind", "spending.").get<std::string>(), "spending.kind");
    s.spending.total_alpha = num(require(jp, "total_alpha", "spending."), "spending.total_alpha");
    if (s.spending.kind == SpendingKind::Fixed) {
        const json& jv = require(jp, "values", "spending.");
        if (!jv.is_array()) fail("spending.values", "expected an array");
        for (const auto& v : jv) s.spending.fixed_values.push_back(num(v, "spending.values"));
    } else if (jp.contains("values")) {
        fail("spending.values", "only valid for fixed boundaries");
    }
    if (jp.contains("label")) {
        if (!jp["label"].is_string()) fail("spending.label", "expected a string");
        s.spending.label = jp["label"].get<std::string>();
    }

    if (j.contains("replications")) {
        if (!j["replications"].is_number_integer()) fail("replications", "expected an integer");
        s.replications = j["replications"].get<long>();
    }
    if (j.contains("master_seed")) {
        if (!j["master_seed"].is_number_unsigned() && !j["master_seed"].is_number_integer())
            fail("master_seed", "expected an integer");
        s.master_seed = j["master_seed"].get<std::uint64_t>();
    }
    if (j.contains("remaining_patient_policy")) {
        const json& jr = j["remaining_patient_policy"];
        if (jr.is_boolean()) {
            s.remaining_patient_policy = jr.get<bool>();
        } else if (jr.is_string()) {
            const auto v = jr.get<std::string>();
            if (v == "on")
                s.remaining_patient_policy = true;
            else if (v == "off")
                s.remaining_patient_policy = false;
            else
                fail("remaining_patient_policy", "expected on|off");
        } else {
            fail("remaining_patient_policy", "expected on|off");
        }
    }
    if (j.contains("test_estimator")) {
        const auto v = j["test_estimator"].get<std::string>();
        if (v == "raw")
            s.test_estimator = TestEstimator::Raw;
        else if (v == "modified")
            s.test_estimator = TestEstimator::Modified;
        else
            fail("test_estimator", "expected raw|modified");
    }
    if (j.contains("rho_report")) {
        const auto v = j["rho_report"].get<std::string>();
        if (v == "at_stop")
            s.rho_report = RhoReport::AtStop;
        else if (v == "full_horizon")
            s.rho_report = RhoReport::FullHorizon;
        else
            fail("rho_report", "expected at_stop|full_horizon");
    }
    return s;
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["scenario_id"] = s.id;
    json jm;
    jm["kind"] = to_string(s.model.kind);
    if (s.model.kind == ModelKind::Normal) {
        jm["arm1"] = {{"mean", s.model.arm1.mean}, {"sd", s.model.arm1.sd}};
        jm["arm2"] = {{"mean", s.model.arm2.mean}, {"sd", s.model.arm2.sd}};
    } else {
        jm["arm1"] = {{"p", s.model.arm1.p}};
        jm["arm2"] = {{"p", s.model.arm2.p}};
    }
    j["model"] = jm;
    json jd;
    jd["kind"] = to_string(s.design.kind);
    if (s.design.kind == DesignKind::DBCD) {
        jd["gamma"] = s.design.gamma;
        jd["burn_in_per_arm"] = s.design.burn_in_per_arm;
    }
    jd["prior_center"] = s.design.prior_center;
    j["design"] = jd;
    j["allocation"] = {{"kind", to_string(s.allocation.kind)}};
    j["schedule"] = {{"look_sizes", s.schedule.look_sizes}};
    json jp;
    jp["kind"] = to_string(s.spending.kind);
    jp["total_alpha"] = s.spending.total_alpha;
    if (s.spending.kind == SpendingKind::Fixed) jp["values"] = s.spending.fixed_values;
    if (!s.spending.label.empty()) jp["label"] = s.spending.label;
    j["spending"] = jp;
    j["replications"] = s.replications;
    j["master_seed"] = s.master_seed;
    j["remaining_patient_policy"] = s.remaining_patient_policy ? "on" : "off";
    j["test_estimator"] = s.test_estimator == TestEstimator::Raw ? "raw" : "modified";
    j["rho_report"] = s.rho_report == RhoReport::AtStop ? "at_stop" : "full_horizon";
    return j;
}

ScenarioBatch scenario_batch_from_json(const json& j) {
    ScenarioBatch batch;
    if (!j.is_object()) throw ParseError("scenario file: expected a JSON object");
    if (!j.contains("rows")) {
        Scenario s = scenario_from_json(j);
        batch.id = s.id;
        batch.rows.push_back(std::move(s));
        return batch;
    }
    check_keys(j, {"scenario_id", "base", "rows"}, "");
    batch.id = require(j, "scenario_id", "").get<std::string>();
    const json& base = require(j, "base", "");
    const json& rows = require(j, "rows", "");
    if (!rows.is_array() || rows.empty()) fail("rows", "expected a non-empty array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        json merged = base;
        if (!rows[i].is_object()) fail("rows", "expected objects");
        for (auto it = rows[i].begin(); it != rows[i].end(); ++it)
            merged[it.key()] = it.value();
        merged["scenario_id"] = batch.id;
        try {
            batch.rows.push_back(scenario_from_json(merged));
        } catch (const ParseError& e) {
            fail("rows[" + std::to_string(i) + "]", e.what());
        }
    }
    return batch;
}

ScenarioBatch load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return scenario_batch_from_json(j);
}

std::string spending_name(const SpendingFunction& fn) {
    return fn.label.empty() ? to_string(fn.kind) : fn.label;
}

namespace {

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

} // namespace

std::string report_csv(const std::vector<RowResult>& rows) {
    std::size_t kmax = 0;
    for (const auto& r : rows) kmax = std::max(kmax, r.scenario.schedule.size());

    std::string out = "scenario_id,design,allocation,spending,replications,rejection_rate";
    for (std::size_t k = 1; k <= kmax; ++k)
        out += ",n_reject_look" + std::to_string(k);
    out += ",rho1_mean,rho1_sd,failures_mean,failures_sd,seed\n";

    for (const auto& r : rows) {
        const auto& s = r.scenario;
        const auto& rep = r.report;
        out += s.id;
        out += ',';
        out += to_string(s.design.kind);
        out += ',';
        out += to_string(s.allocation.kind);
        out += ',';
        out += spending_name(s.spending);
        out += ',' + std::to_string(rep.replications);
        out += ',' + fmt("%.4f", rep.rejection_rate);
        for (std::size_t k = 0; k < kmax; ++k) {
            out += ',';
            if (k < rep.rejections_by_look.size())
                out += std::to_string(rep.rejections_by_look[k]);
        }
        out += ',' + fmt("%.4f", rep.rho1_mean);
        out += ',' + fmt("%.4f", rep.rho1_sd);
        out += ',';
        if (rep.has_failures) out += fmt("%.2f", rep.failures_mean);
        out += ',';
        if (rep.has_failures) out += fmt("%.2f", rep.failures_sd);
        out += ',' + std::to_string(rep.master_seed) + '\n';
    }
    return out;
}

json report_to_json(const RowResult& row) {
    json j;
    j["scenario"] = scenario_to_json(row.scenario);
    json r;
    r["rejection_rate"] = row.report.rejection_rate;
    r["rejections_by_look"] = row.report.rejections_by_look;
    r["rho1_mean"] = row.report.rho1_mean;
    r["rho1_sd"] = row.report.rho1_sd;
    if (row.report.has_failures) {
        r["failures_mean"] = row.report.failures_mean;
        r["failures_sd"] = row.report.failures_sd;
    }
    r["replications"] = row.report.replications;
    r["master_seed"] = row.report.master_seed;
    j["report"] = r;
    return j;
}

bool operator==(const ArmParams& a, const ArmParams& b) {
    return a.mean == b.mean && a.sd == b.sd && a.p == b.p;
}

bool operator==(const Scenario& a, const Scenario& b) {
    const bool dbcd_fields_equal =
        a.design.kind != DesignKind::DBCD ||
        (a.design.gamma == b.design.gamma &&
         a.design.burn_in_per_arm == b.design.burn_in_per_arm);
    return a.id == b.id && a.model.kind == b.model.kind && a.model.arm1 == b.model.arm1 &&
           a.model.arm2 == b.model.arm2 && a.design.kind == b.design.kind &&
           dbcd_fields_equal && a.design.prior_center == b.design.prior_center &&
           a.allocation.kind == b.allocation.kind &&
           a.schedule.look_sizes == b.schedule.look_sizes &&
           a.spending.kind == b.spending.kind &&
           a.spending.total_alpha == b.spending.total_alpha &&
           a.spending.fixed_values == b.spending.fixed_values &&
           a.spending.label == b.spending.label && a.replications == b.replications &&
           a.master_seed == b.master_seed &&
           a.remaining_patient_policy == b.remaining_patient_policy &&
           a.test_estimator == b.test_estimator && a.rho_report == b.rho_report;
}

} // namespace seqrar
