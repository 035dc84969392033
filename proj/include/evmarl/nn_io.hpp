#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "evmarl/common.hpp"
#include "evmarl/mlp.hpp"
#include "evmarl/optim.hpp"

namespace evmarl {

// Flat text serialization for networks and optimizer states. Doubles are
// written as their raw IEEE-754 bits in hex, so round-trips are bit-exact
// by construction and the files stay diffable.

namespace io {

inline void put_f64(std::ostream& os, double v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
    os << buf;
}

struct TokenReader {
    std::istream& in;

    std::string next() {
        std::string t;
        if (!(in >> t)) throw config_error("serialization: unexpected end of file");
        return t;
    }

    void expect(const std::string& want) {
        const std::string got = next();
        if (got != want)
            throw config_error("serialization: expected '" + want + "', got '" + got + "'");
    }

    std::uint64_t u64() {
        const std::string t = next();
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(t, &pos, 10);
            if (pos != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw config_error("serialization: bad integer '" + t + "'");
        }
    }

    double f64() {
        const std::string t = next();
        if (t.size() != 16 || t.find_first_not_of("0123456789abcdef") != std::string::npos)
            throw config_error("serialization: bad value token '" + t + "'");
        const std::uint64_t bits = std::stoull(t, nullptr, 16);
        return std::bit_cast<double>(bits);
    }
};

inline void write_array(std::ostream& os, const char* tag, const double* v,
                        std::size_t n) {
    os << tag << ' ' << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        put_f64(os, v[i]);
        os << ((i + 1) % 8 == 0 || i + 1 == n ? '\n' : ' ');
    }
}

inline void read_array(TokenReader& r, const char* tag, double* v, std::size_t n) {
    r.expect(tag);
    const std::uint64_t stored = r.u64();
    if (stored != n)
        throw config_error(std::string("serialization: array '") + tag + "' has " +
                           std::to_string(stored) + " values, expected " +
                           std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) v[i] = r.f64();
}

}  // namespace io

inline constexpr int kNetFormatVersion = 1;

inline void write_mlp(std::ostream& os, const Mlp& net) {
    os << "net " << kNetFormatVersion << '\n';
    os << "sizes " << net.layer_sizes.size();
    for (int s : net.layer_sizes) os << ' ' << s;
    os << '\n';
    os << "output_activation " << activation_name(net.output_activation) << '\n';
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        io::write_array(os, "w", net.layers[l].w.d.data(), net.layers[l].w.d.size());
        io::write_array(os, "b", net.layers[l].b.data(), net.layers[l].b.size());
    }
}

inline Mlp read_mlp(io::TokenReader& r) {
    r.expect("net");
    const auto version = r.u64();
    if (version != kNetFormatVersion)
        throw config_error("serialization: unsupported net format version " +
                           std::to_string(version));
    r.expect("sizes");
    const auto n_sizes = r.u64();
    if (n_sizes < 2 || n_sizes > 64)
        throw config_error("serialization: implausible layer count");
    Mlp net;
    net.layer_sizes.resize(n_sizes);
    for (auto& s : net.layer_sizes) {
        s = static_cast<int>(r.u64());
        if (s < 1 || s > 100000) throw config_error("serialization: bad layer size");
    }
    r.expect("output_activation");
    net.output_activation = activation_from_name(r.next());
    net.layers.resize(n_sizes - 1);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        layer.w.resize(net.layer_sizes[l], net.layer_sizes[l + 1]);
        io::read_array(r, "w", layer.w.d.data(), layer.w.d.size());
        layer.b.resize(net.layer_sizes[l + 1]);
        io::read_array(r, "b", layer.b.data(), layer.b.size());
        layer.act =
            (l + 1 == net.layers.size()) ? net.output_activation : Activation::relu;
    }
    return net;
}

inline Mlp read_mlp(std::istream& is) {
    io::TokenReader r{is};
    return read_mlp(r);
}

inline void write_adam(std::ostream& os, const OptimizerState& opt) {
    os << "adam " << kNetFormatVersion << '\n';
    os << "step " << opt.step << '\n';
    os << "hyper ";
    io::put_f64(os, opt.cfg.lr);
    os << ' ';
    io::put_f64(os, opt.cfg.beta1);
    os << ' ';
    io::put_f64(os, opt.cfg.beta2);
    os << ' ';
    io::put_f64(os, opt.cfg.eps);
    os << '\n';
    for (std::size_t l = 0; l < opt.m_w.size(); ++l) {
        io::write_array(os, "mw", opt.m_w[l].d.data(), opt.m_w[l].d.size());
        io::write_array(os, "vw", opt.v_w[l].d.data(), opt.v_w[l].d.size());
        io::write_array(os, "mb", opt.m_b[l].data(), opt.m_b[l].size());
        io::write_array(os, "vb", opt.v_b[l].data(), opt.v_b[l].size());
    }
}

// Optimizer state is shape-bound to its net, so reading needs the net.
inline OptimizerState read_adam(io::TokenReader& r, const Mlp& net) {
    r.expect("adam");
    const auto version = r.u64();
    if (version != kNetFormatVersion)
        throw config_error("serialization: unsupported optimizer format version " +
                           std::to_string(version));
    r.expect("step");
    OptimizerState opt = make_adam(net, AdamConfig{});
    opt.step = r.u64();
    r.expect("hyper");
    opt.cfg.lr = r.f64();
    opt.cfg.beta1 = r.f64();
    opt.cfg.beta2 = r.f64();
    opt.cfg.eps = r.f64();
    opt.cfg.validate();
    for (std::size_t l = 0; l < opt.m_w.size(); ++l) {
        io::read_array(r, "mw", opt.m_w[l].d.data(), opt.m_w[l].d.size());
        io::read_array(r, "vw", opt.v_w[l].d.data(), opt.v_w[l].d.size());
        io::read_array(r, "mb", opt.m_b[l].data(), opt.m_b[l].size());
        io::read_array(r, "vb", opt.v_b[l].data(), opt.v_b[l].size());
    }
    return opt;
}

inline OptimizerState read_adam(std::istream& is, const Mlp& net) {
    io::TokenReader r{is};
    return read_adam(r, net);
}

}  // namespace evmarl
