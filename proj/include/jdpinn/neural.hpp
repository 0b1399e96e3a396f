#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace jdpinn {

enum class Activation { sigmoid, tanh, relu };

Activation parse_activation(const std::string& text);
std::string to_string(Activation a);

struct NetworkArchitecture {
    std::vector<int> layer_sizes{2, 64, 32, 16, 8, 1};
    Activation activation = Activation::sigmoid;  // hidden layers; the output layer is affine

    /// Throws UsageError unless sizes start with 2, end with 1 and are all positive.
    void validate() const;
    std::size_t layer_count() const { return layer_sizes.size() - 1; }
    std::size_t param_count() const;
    /// Offset of layer l's weight block (row-major, out x in) in the flat vector.
    std::size_t weight_offset(std::size_t l) const;
    /// Offset of layer l's bias vector; it directly follows the weights.
    std::size_t bias_offset(std::size_t l) const { return weight_offset(l) + weight_count(l); }
    std::size_t weight_count(std::size_t l) const {
        return static_cast<std::size_t>(layer_sizes[l]) * static_cast<std::size_t>(layer_sizes[l + 1]);
    }
};

/// theta = (W, b) flattened layer by layer: W_l then b_l.
struct NetworkParams {
    std::vector<double> values;
};

/// Network output and its input derivatives.
struct EvalResult {
    double n = 0.0;
    double dn_dt = 0.0;
    double dn_ds = 0.0;
    double d2n_ds2 = 0.0;
};

/// Sensitivities of a scalar functional with respect to (N, dN/dt, dN/dS, d2N/dS2)
/// at one input point.
struct Upstream {
    double n = 0.0;
    double dn_dt = 0.0;
    double dn_ds = 0.0;
    double d2n_ds2 = 0.0;
};

/// Scratch space for one forward/backward pass. Holds, per layer, the
/// (value, d/dt, d/dS, d2/dS2) tuples of every unit plus the activation
/// derivatives the reverse sweep needs.
class Workspace {
public:
    explicit Workspace(const NetworkArchitecture& arch);

private:
    friend EvalResult forward(const NetworkArchitecture&, std::span<const double>, double, double, Workspace&);
    friend void backward(const NetworkArchitecture&, std::span<const double>, const Upstream&, Workspace&,
                         std::span<double>);

    struct Channels {
        std::vector<double> v, t, s, ss;
        void resize(std::size_t n) {
            v.assign(n, 0.0);
            t.assign(n, 0.0);
            s.assign(n, 0.0);
            ss.assign(n, 0.0);
        }
    };
    std::vector<Channels> act_;   // act_[l]: input to layer l (act_[0] = inputs)
    std::vector<Channels> pre_;   // pre_[l]: pre-activations of hidden layer l
    std::vector<std::vector<double>> d1_, d2_, d3_;  // f', f'', f''' at pre_[l].v
    Channels grad_a_, grad_z_;
};

NetworkParams init_params(const NetworkArchitecture& arch, std::uint64_t seed);

/// Forward pass with analytic input derivatives (forward-over-forward for the
/// second S derivative). ReLU uses f'(0) = 0 and f'' = 0.
EvalResult forward(const NetworkArchitecture& arch, std::span<const double> params, double t, double s,
                   Workspace& ws);

EvalResult eval(const NetworkArchitecture& arch, const NetworkParams& params, double t, double s);

/// Reverse sweep through the last forward() held in ws; adds
/// d(functional)/d(theta) into grad (which must have param_count() entries).
void backward(const NetworkArchitecture& arch, std::span<const double> params, const Upstream& up, Workspace& ws,
              std::span<double> grad);

/// Convenience wrapper: forward + backward at one point, returning a fresh gradient.
std::vector<double> param_gradients(const NetworkArchitecture& arch, const NetworkParams& params, double t,
                                    double s, const Upstream& up);

/// Closed-form single-hidden-layer sigmoid formulas,
///   N = sum_r q_r f(z_r) + b_out,  z_r = w_r t + gamma_r S + b_r,
///   dN/dt = sum q_r w_r f (1 - f), dN/dS = sum q_r gamma_r f (1 - f),
///   d2N/dS2 = sum q_r gamma_r^2 f (1 - f)(1 - 2 f).
/// Requires a 2-M-1 sigmoid architecture.
EvalResult single_layer_analytic(const NetworkArchitecture& arch, const NetworkParams& params, double t, double s);

/// Text format, version 1:
///   jdpinn-weights v1
///   layers: 2 64 32 16 8 1
///   activation: sigmoid
///   <row-major weights of layer 1>
///   <biases of layer 1>
///   ...
/// Numbers use the shortest representation that round-trips exactly.
void save_weights(const std::filesystem::path& path, const NetworkArchitecture& arch, const NetworkParams& params);
std::pair<NetworkArchitecture, NetworkParams> load_weights(const std::filesystem::path& path);

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

}  // namespace jdpinn
