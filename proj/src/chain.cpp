#include "graphflow/chain.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace graphflow {

namespace {

using nlohmann::json;

// Reachability over the support graph of a kernel (edges K(x,y) > 0).
std::vector<bool> reachable_from(const Mat& K, int start, bool transpose) {
    const int n = static_cast<int>(K.rows());
    std::vector<bool> seen(n, false);
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        for (int y = 0; y < n; ++y) {
            const double k = transpose ? K(y, x) : K(x, y);
            if (k > 0.0 && !seen[y]) {
                seen[y] = true;
                stack.push_back(y);
            }
        }
    }
    return seen;
}

bool is_irreducible(const Mat& K) {
    const auto fwd = reachable_from(K, 0, false);
    const auto bwd = reachable_from(K, 0, true);
    for (size_t i = 0; i < fwd.size(); ++i)
        if (!fwd[i] || !bwd[i]) return false;
    return true;
}

void check_stochastic(const Mat& K) {
    const int n = static_cast<int>(K.rows());
    if (n < 2 || K.cols() != n) throw SchemaError("kernel must be square with n >= 2");
    for (int x = 0; x < n; ++x) {
        double row = 0.0;
        for (int y = 0; y < n; ++y) {
            if (K(x, y) < 0.0)
                throw NotStochastic("negative kernel entry at (" + std::to_string(x) + "," +
                                    std::to_string(y) + ")");
            row += K(x, y);
        }
        if (std::abs(row - 1.0) > kRowSumTol)
            throw NotStochastic("row " + std::to_string(x) + " sums to " + std::to_string(row));
    }
}

Vec json_to_vec(const json& j, const char* what) {
    if (!j.is_array()) throw SchemaError(std::string(what) + " must be an array");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw SchemaError(std::string(what) + " entries must be numbers");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

}  // namespace

Vec stationary_distribution(const Mat& K) {
    check_stochastic(K);
    if (!is_irreducible(K)) throw NotIrreducible("kernel support graph is not strongly connected");
    const int n = static_cast<int>(K.rows());

    Vec pi(n);
    if (n <= 64) {
        // (K^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
        Mat M = K.transpose() - Mat::Identity(n, n);
        Vec rhs = Vec::Zero(n);
        M.row(n - 1).setOnes();
        rhs(n - 1) = 1.0;
        pi = M.fullPivLu().solve(rhs);
    } else {
        pi = Vec::Constant(n, 1.0 / n);
        for (int it = 0; it < 100000; ++it) {
            Vec next = K.transpose() * pi;
            next /= next.sum();
            const double delta = (next - pi).cwiseAbs().maxCoeff();
            pi = next;
            if (delta < 1e-15) break;
        }
    }

    // One multiplicative refinement pass; keeps the fixed-point residual
    // at the 1e-12 level required of accepted chains.
    for (int it = 0; it < 8; ++it) {
        const double res = (K.transpose() * pi - pi).cwiseAbs().maxCoeff();
        if (res <= 1e-13) break;
        pi = K.transpose() * pi;
        pi /= pi.sum();
    }

    if (!(pi.array() > 0.0).all())
        throw NotIrreducible("computed stationary distribution has nonpositive entries");
    pi /= pi.sum();
    return pi;
}

MarkovChain make_chain(const Mat& K, const Vec& pi_in, const Vec& p_in, double a, double b,
                       bool normalize_p, std::vector<std::string> states) {
    check_stochastic(K);
    if (!is_irreducible(K)) throw NotIrreducible("kernel support graph is not strongly connected");
    const int n = static_cast<int>(K.rows());

    Vec pi = pi_in;
    if (pi.size() == 0) {
        pi = stationary_distribution(K);
    } else {
        if (pi.size() != n) throw SchemaError("pi has wrong length");
        if (!(pi.array() > 0.0).all()) throw SchemaError("pi must be strictly positive");
        if (std::abs(pi.sum() - 1.0) > kStationaryTol) throw SchemaError("pi must sum to 1");
    }
    if ((K.transpose() * pi - pi).cwiseAbs().maxCoeff() > kStationaryTol)
        throw SchemaError("pi is not stationary for K");

    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (std::abs(pi(x) * K(x, y) - pi(y) * K(y, x)) > kReversibleTol)
                throw NotReversible("detailed balance fails at (" + std::to_string(x) + "," +
                                    std::to_string(y) + ")");

    Vec p = p_in.size() == 0 ? Vec::Ones(n) : p_in;
    if (p.size() != n) throw SchemaError("p has wrong length");
    if (!(p.array() > 0.0).all()) throw BadReference("reference direction p must be > 0");
    const double pmass = p.dot(pi);
    if (normalize_p) {
        p /= pmass;
    } else if (std::abs(pmass - 1.0) > kReferenceTol) {
        throw BadReference("p has pi-weighted mass " + std::to_string(pmass) +
                           " != 1 (pass normalize_p to rescale)");
    }

    if (!(a > 0.0) || !(b > 0.0)) throw SchemaError("weights a, b must be positive");

    MarkovChain chain;
    chain.n = n;
    chain.K = K;
    chain.pi = pi;
    chain.p = p;
    chain.a = a;
    chain.b = b;
    if (states.empty()) {
        for (int i = 0; i < n; ++i) states.push_back("s" + std::to_string(i));
    }
    if (static_cast<int>(states.size()) != n) throw SchemaError("states list has wrong length");
    chain.states = std::move(states);
    return chain;
}

MarkovChain load_chain(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("chain document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("chain document must be a JSON object");
    if (!doc.contains("K")) throw SchemaError("chain document lacks \"K\"");

    const json& jk = doc["K"];
    if (!jk.is_array() || jk.empty()) throw SchemaError("\"K\" must be an array of rows");
    const int n = static_cast<int>(jk.size());
    Mat K(n, n);
    for (int x = 0; x < n; ++x) {
        Vec row = json_to_vec(jk[x], "K row");
        if (row.size() != n) throw SchemaError("\"K\" must be square");
        K.row(x) = row;
    }

    std::vector<std::string> states;
    if (doc.contains("states")) {
        for (const auto& s : doc["states"]) states.push_back(s.get<std::string>());
    }
    Vec pi, p;
    if (doc.contains("pi")) pi = json_to_vec(doc["pi"], "pi");
    if (doc.contains("p")) p = json_to_vec(doc["p"], "p");
    const double a = doc.value("a", 1.0);
    const double b = doc.value("b", 1.0);
    const bool normalize_p = doc.value("normalize_p", false);

    return make_chain(K, pi, p, a, b, normalize_p, std::move(states));
}

MarkovChain load_chain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open chain file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_chain(buf.str());
}

std::string serialize_chain(const MarkovChain& chain) {
    json doc;
    doc["states"] = chain.states;
    json rows = json::array();
    for (int x = 0; x < chain.n; ++x) {
        json row = json::array();
        for (int y = 0; y < chain.n; ++y) row.push_back(chain.K(x, y));
        rows.push_back(row);
    }
    doc["K"] = rows;
    doc["pi"] = std::vector<double>(chain.pi.data(), chain.pi.data() + chain.n);
    doc["p"] = std::vector<double>(chain.p.data(), chain.p.data() + chain.n);
    doc["a"] = chain.a;
    doc["b"] = chain.b;
    return doc.dump(2);
}

double total_mass(const Measure& mu, const MarkovChain& chain) { return mu.dot(chain.pi); }

Measure parse_measure(const std::string& text, const MarkovChain& chain) {
    Vec v;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            throw SchemaError(std::string("measure is not valid JSON: ") + e.what());
        }
        if (doc.is_object() && doc.contains("values")) doc = doc["values"];
        v = json_to_vec(doc, "measure");
    } else {
        // Inline "v1,v2,..." syntax.
        std::vector<double> vals;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                vals.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw SchemaError("bad measure entry: \"" + tok + "\"");
            }
        }
        v = Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    }
    if (v.size() != chain.n) throw SchemaError("measure length does not match state count");
    if (!is_nonnegative(v)) throw SchemaError("measure has negative entries");
    return v;
}

Measure load_measure_file(const std::string& path, const MarkovChain& chain) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open measure file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_measure(buf.str(), chain);
}

}  // namespace graphflow
