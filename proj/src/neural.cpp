#include "jdpinn/neural.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jdpinn/error.hpp"
#include "jdpinn/rng.hpp"

namespace jdpinn {

namespace {

struct ActivationValues {
    double f, d1, d2, d3;
};

inline ActivationValues activate(Activation a, double z) {
    switch (a) {
    case Activation::sigmoid: {
        const double f = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
        const double d1 = f * (1.0 - f);
        return {f, d1, d1 * (1.0 - 2.0 * f), d1 * (1.0 - 6.0 * f + 6.0 * f * f)};
    }
    case Activation::tanh: {
        const double f = std::tanh(z);
        const double d1 = 1.0 - f * f;
        return {f, d1, -2.0 * f * d1, d1 * (6.0 * f * f - 2.0)};
    }
    case Activation::relu:
        return z > 0.0 ? ActivationValues{z, 1.0, 0.0, 0.0} : ActivationValues{0.0, 0.0, 0.0, 0.0};
    }
    return {};
}

std::vector<double> parse_numbers(const std::string& line, std::size_t expected, const std::string& what) {
    std::vector<double> out;
    out.reserve(expected);
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p == end) break;
        double v;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc()) throw DataError("weight file: bad number in " + what);
        out.push_back(v);
        p = next;
    }
    if (out.size() != expected)
        throw DataError("weight file: " + what + " has " + std::to_string(out.size()) + " values, expected " +
                        std::to_string(expected));
    return out;
}

}  // namespace

Activation parse_activation(const std::string& text) {
    if (text == "sigmoid") return Activation::sigmoid;
    if (text == "tanh") return Activation::tanh;
    if (text == "relu") return Activation::relu;
    throw UsageError("unknown activation '" + text + "' (expected sigmoid, tanh or relu)");
}

std::string to_string(Activation a) {
    switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    }
    return "?";
}

void NetworkArchitecture::validate() const {
    if (layer_sizes.size() < 2) throw UsageError("architecture needs at least an input and an output layer");
    if (layer_sizes.front() != 2) throw UsageError("architecture must start with 2 inputs (t, S)");
    if (layer_sizes.back() != 1) throw UsageError("architecture must end with a single output");
    for (int n : layer_sizes)
        if (n <= 0) throw UsageError("layer sizes must be positive");
}

std::size_t NetworkArchitecture::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < layer_count(); ++l) n += weight_count(l) + static_cast<std::size_t>(layer_sizes[l + 1]);
    return n;
}

std::size_t NetworkArchitecture::weight_offset(std::size_t l) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < l; ++k) off += weight_count(k) + static_cast<std::size_t>(layer_sizes[k + 1]);
    return off;
}

Workspace::Workspace(const NetworkArchitecture& arch) {
    const std::size_t layers = arch.layer_count();
    act_.resize(layers);
    pre_.resize(layers);
    d1_.resize(layers);
    d2_.resize(layers);
    d3_.resize(layers);
    std::size_t widest = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        act_[l].resize(arch.layer_sizes[l]);
        pre_[l].resize(arch.layer_sizes[l + 1]);
        d1_[l].assign(arch.layer_sizes[l + 1], 0.0);
        d2_[l].assign(arch.layer_sizes[l + 1], 0.0);
        d3_[l].assign(arch.layer_sizes[l + 1], 0.0);
        widest = std::max<std::size_t>(widest, std::max(arch.layer_sizes[l], arch.layer_sizes[l + 1]));
    }
    grad_a_.resize(widest);
    grad_z_.resize(widest);
}

NetworkParams init_params(const NetworkArchitecture& arch, std::uint64_t seed) {
    arch.validate();
    NetworkParams p;
    p.values.assign(arch.param_count(), 0.0);
    PhiloxStream rng(derive_seed(seed, 0x1417), 0);
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        const double limit = std::sqrt(6.0 / (arch.layer_sizes[l] + arch.layer_sizes[l + 1]));
        const std::size_t off = arch.weight_offset(l);
        for (std::size_t i = 0; i < arch.weight_count(l); ++i) p.values[off + i] = limit * (2.0 * rng.uniform() - 1.0);
    }
    return p;
}

EvalResult forward(const NetworkArchitecture& arch, std::span<const double> params, double t, double s,
                   Workspace& ws) {
    auto& in = ws.act_[0];
    in.v[0] = t;
    in.v[1] = s;
    in.t[0] = 1.0;
    in.t[1] = 0.0;
    in.s[0] = 0.0;
    in.s[1] = 1.0;
    in.ss[0] = 0.0;
    in.ss[1] = 0.0;

    const std::size_t layers = arch.layer_count();
    EvalResult out;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t n_in = arch.layer_sizes[l];
        const std::size_t n_out = arch.layer_sizes[l + 1];
        const double* w = params.data() + arch.weight_offset(l);
        const double* b = w + n_in * n_out;
        const auto& a = ws.act_[l];
        const bool last = l + 1 == layers;
        for (std::size_t o = 0; o < n_out; ++o) {
            const double* row = w + o * n_in;
            double z = b[o], zt = 0.0, zs = 0.0, zss = 0.0;
            for (std::size_t i = 0; i < n_in; ++i) {
                z += row[i] * a.v[i];
                zt += row[i] * a.t[i];
                zs += row[i] * a.s[i];
                zss += row[i] * a.ss[i];
            }
            if (last) {
                out = {z, zt, zs, zss};
                continue;
            }
            auto& pre = ws.pre_[l];
            pre.v[o] = z;
            pre.t[o] = zt;
            pre.s[o] = zs;
            pre.ss[o] = zss;
            const auto f = activate(arch.activation, z);
            ws.d1_[l][o] = f.d1;
            ws.d2_[l][o] = f.d2;
            ws.d3_[l][o] = f.d3;
            auto& next = ws.act_[l + 1];
            next.v[o] = f.f;
            next.t[o] = f.d1 * zt;
            next.s[o] = f.d1 * zs;
            next.ss[o] = f.d2 * zs * zs + f.d1 * zss;
        }
    }
    return out;
}

EvalResult eval(const NetworkArchitecture& arch, const NetworkParams& params, double t, double s) {
    Workspace ws(arch);
    return forward(arch, params.values, t, s, ws);
}

void backward(const NetworkArchitecture& arch, std::span<const double> params, const Upstream& up, Workspace& ws,
              std::span<double> grad) {
    const std::size_t layers = arch.layer_count();
    auto& gz = ws.grad_z_;
    auto& ga = ws.grad_a_;
    gz.v[0] = up.n;
    gz.t[0] = up.dn_dt;
    gz.s[0] = up.dn_ds;
    gz.ss[0] = up.d2n_ds2;

    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t n_in = arch.layer_sizes[l];
        const std::size_t n_out = arch.layer_sizes[l + 1];
        const std::size_t woff = arch.weight_offset(l);
        const double* w = params.data() + woff;
        double* gw = grad.data() + woff;
        double* gb = gw + n_in * n_out;
        const auto& a = ws.act_[l];

        // Affine layer: accumulate parameter gradients.
        for (std::size_t o = 0; o < n_out; ++o) {
            const double cv = gz.v[o], ct = gz.t[o], cs = gz.s[o], css = gz.ss[o];
            double* grow = gw + o * n_in;
            for (std::size_t i = 0; i < n_in; ++i) grow[i] += cv * a.v[i] + ct * a.t[i] + cs * a.s[i] + css * a.ss[i];
            gb[o] += cv;
        }
        if (l == 0) break;

        // Propagate to the layer inputs: g_a = W^T g_z per channel.
        for (std::size_t i = 0; i < n_in; ++i) {
            ga.v[i] = ga.t[i] = ga.s[i] = ga.ss[i] = 0.0;
        }
        for (std::size_t o = 0; o < n_out; ++o) {
            const double* row = w + o * n_in;
            const double cv = gz.v[o], ct = gz.t[o], cs = gz.s[o], css = gz.ss[o];
            for (std::size_t i = 0; i < n_in; ++i) {
                ga.v[i] += row[i] * cv;
                ga.t[i] += row[i] * ct;
                ga.s[i] += row[i] * cs;
                ga.ss[i] += row[i] * css;
            }
        }

        // Activation of hidden layer l-1: h = f(z), h_t = f' z_t, h_s = f' z_s,
        // h_ss = f'' z_s^2 + f' z_ss.
        const auto& pre = ws.pre_[l - 1];
        const auto& d1 = ws.d1_[l - 1];
        const auto& d2 = ws.d2_[l - 1];
        const auto& d3 = ws.d3_[l - 1];
        for (std::size_t u = 0; u < n_in; ++u) {
            const double zt = pre.t[u], zs = pre.s[u], zss = pre.ss[u];
            const double gv = ga.v[u], gt = ga.t[u], gs = ga.s[u], gss = ga.ss[u];
            gz.v[u] = gv * d1[u] + (gt * zt + gs * zs) * d2[u] + gss * (d3[u] * zs * zs + d2[u] * zss);
            gz.t[u] = gt * d1[u];
            gz.s[u] = gs * d1[u] + 2.0 * gss * d2[u] * zs;
            gz.ss[u] = gss * d1[u];
        }
    }
}

std::vector<double> param_gradients(const NetworkArchitecture& arch, const NetworkParams& params, double t,
                                    double s, const Upstream& up) {
    Workspace ws(arch);
    std::vector<double> grad(arch.param_count(), 0.0);
    forward(arch, params.values, t, s, ws);
    backward(arch, params.values, up, ws, grad);
    return grad;
}

EvalResult single_layer_analytic(const NetworkArchitecture& arch, const NetworkParams& params, double t, double s) {
    if (arch.layer_sizes.size() != 3 || arch.layer_sizes[0] != 2 || arch.layer_sizes[2] != 1 ||
        arch.activation != Activation::sigmoid)
        throw UsageError("single_layer_analytic requires a 2-M-1 sigmoid network");
    const std::size_t m = arch.layer_sizes[1];
    const double* w1 = params.values.data();  // m x 2: (w_r, gamma_r)
    const double* b1 = w1 + 2 * m;
    const double* q = b1 + m;
    const double b_out = q[m];

    EvalResult r;
    r.n = b_out;
    for (std::size_t k = 0; k < m; ++k) {
        const double w = w1[2 * k], gamma = w1[2 * k + 1];
        const double f = 1.0 / (1.0 + std::exp(-(w * t + gamma * s + b1[k])));
        const double g = f * (1.0 - f);
        r.n += q[k] * f;
        r.dn_dt += q[k] * w * g;
        r.dn_ds += q[k] * gamma * g;
        r.d2n_ds2 += q[k] * gamma * gamma * g * (1.0 - 2.0 * f);
    }
    return r;
}

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

void save_weights(const std::filesystem::path& path, const NetworkArchitecture& arch, const NetworkParams& params) {
    arch.validate();
    if (params.values.size() != arch.param_count()) throw UsageError("parameter vector does not match architecture");
    std::ofstream os(path);
    if (!os) throw DataError("cannot write '" + path.string() + "'");
    os << "jdpinn-weights v1\nlayers:";
    for (int n : arch.layer_sizes) os << ' ' << n;
    os << "\nactivation: " << to_string(arch.activation) << '\n';
    auto write_block = [&](std::size_t off, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            if (i) os << ' ';
            os << format_double(params.values[off + i]);
        }
        os << '\n';
    };
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        write_block(arch.weight_offset(l), arch.weight_count(l));
        write_block(arch.bias_offset(l), arch.layer_sizes[l + 1]);
    }
}

std::pair<NetworkArchitecture, NetworkParams> load_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("jdpinn-weights v1", 0) != 0)
        throw DataError("weight file: missing 'jdpinn-weights v1' header");

    NetworkArchitecture arch;
    if (!std::getline(in, line) || line.rfind("layers:", 0) != 0) throw DataError("weight file: missing layers line");
    {
        std::istringstream is(line.substr(7));
        arch.layer_sizes.clear();
        int n;
        while (is >> n) arch.layer_sizes.push_back(n);
    }
    if (!std::getline(in, line) || line.rfind("activation:", 0) != 0)
        throw DataError("weight file: missing activation line");
    {
        std::istringstream is(line.substr(11));
        std::string name;
        is >> name;
        arch.activation = parse_activation(name);
    }
    try {
        arch.validate();
    } catch (const UsageError& e) {
        throw DataError(std::string("weight file: ") + e.what());
    }

    NetworkParams params;
    params.values.reserve(arch.param_count());
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        const std::string tag = "layer " + std::to_string(l + 1);
        if (!std::getline(in, line)) throw DataError("weight file: truncated at " + tag + " weights");
        auto w = parse_numbers(line, arch.weight_count(l), tag + " weights");
        if (!std::getline(in, line)) throw DataError("weight file: truncated at " + tag + " biases");
        auto b = parse_numbers(line, arch.layer_sizes[l + 1], tag + " biases");
        params.values.insert(params.values.end(), w.begin(), w.end());
        params.values.insert(params.values.end(), b.begin(), b.end());
    }
    for (double v : params.values)
        if (!std::isfinite(v)) throw DataError("weight file: non-finite parameter");
    return {arch, params};
}

}  // namespace jdpinn
