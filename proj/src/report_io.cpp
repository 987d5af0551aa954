#include "graphflow/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

namespace graphflow {

namespace {

using nlohmann::json;

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

json vec_to_json(const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::string solve_report_to_json(const SolveReport& report, const MarkovChain& chain,
                                 const std::string& metric) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["metric"] = metric;
    doc["value"] = report.value;
    doc["distance"] = report.distance;
    doc["iterations"] = report.iterations;
    doc["converged"] = report.converged;
    doc["opt_residual"] = report.opt_residual;
    doc["speed_variation"] = report.speed_variation;
    doc["min_interior_mass"] = report.min_interior_mass;
    doc["intervals"] = report.trajectory.intervals();
    doc["mu0"] = vec_to_json(report.trajectory.mu.front());
    doc["mu1"] = vec_to_json(report.trajectory.mu.back());
    doc["states"] = chain.states;
    if (report.has_shift) {
        doc["shift_h0"] = report.shift_h0;
        doc["shift_h1"] = report.shift_h1;
    }
    return doc.dump(2) + "\n";
}

std::string ray_manifest_to_json(const std::vector<RayResult>& rays, const MarkovChain& chain) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["states"] = chain.states;
    json list = json::array();
    for (size_t i = 0; i < rays.size(); ++i) {
        json r;
        r["ray"] = i;
        r["stop_reason"] = to_string(rays[i].stop_reason);
        r["stop_time"] = rays[i].stop_time;
        r["speed_drift"] = rays[i].speed_drift;
        r["samples"] = rays[i].trajectory.size();
        r["initial_h"] = rays[i].trajectory.front().state.h;
        list.push_back(r);
    }
    doc["rays"] = list;
    return doc.dump(2) + "\n";
}

std::string ray_to_csv(const RayResult& ray, const MarkovChain& chain) {
    const int n = chain.n;
    std::string out = "t";
    for (int x = 0; x < n; ++x) out += ",mu_" + chain.states[x];
    out += ",h,speed";
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (chain.has_edge(x, y)) out += ",gpsi_" + chain.states[x] + "_" + chain.states[y];
    out += "\n";
    for (const auto& sample : ray.trajectory) {
        append_double(out, sample.t);
        for (int x = 0; x < n; ++x) {
            out += ",";
            append_double(out, sample.state.mu(x));
        }
        out += ",";
        append_double(out, sample.state.h);
        out += ",";
        append_double(out, sample.speed);
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                if (chain.has_edge(x, y)) {
                    out += ",";
                    append_double(out, sample.state.grad_psi(x, y));
                }
        out += "\n";
    }
    return out;
}

std::string gap_report_to_json(const GapReport& gap, const MarkovChain& chain) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["primal_half_sq"] = gap.primal_half_sq;
    doc["dual_value"] = gap.dual;
    doc["rel_gap"] = gap.rel_gap;
    doc["feasibility_margin"] = gap.feasibility_margin;
    doc["primal_distance"] = gap.primal.distance;
    doc["primal_converged"] = gap.primal.converged;
    doc["certificate_intervals"] = gap.certificate.intervals();
    doc["states"] = chain.states;
    return doc.dump(2) + "\n";
}

std::string certificate_to_csv(const DualCertificate& cert, const MarkovChain& chain) {
    const int n = chain.n;
    std::string out = "t";
    for (int x = 0; x < n; ++x) out += ",phi_" + chain.states[x];
    out += "\n";
    const int M = cert.intervals();
    for (int k = 0; k <= M; ++k) {
        append_double(out, double(k) / M);
        for (int x = 0; x < n; ++x) {
            out += ",";
            append_double(out, cert.phi[k](x));
        }
        out += "\n";
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace graphflow
