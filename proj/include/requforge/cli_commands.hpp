#pragma once

// Command implementations behind the requ-forge CLI. Kept as library
// functions so the test suite can drive them directly; the binary is a thin
// argument-parsing wrapper. Exit codes: 0 success, 1 verification FAIL,
// 2 invalid input.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "requforge/approximator.hpp"
#include "requforge/gadgets.hpp"
#include "requforge/serialize.hpp"
#include "requforge/sweep.hpp"
#include "requforge/taylor.hpp"

namespace requforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInvalid = 2;

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct BuildArgs {
    std::string fn;
    int d = 1;
    double r = 2.0;
    std::optional<double> R;        // defaults to the registry radius
    double eps = 0.25;
    double domain = 1.0;
    std::optional<int> m_override;
    std::optional<double> c_override;
    std::string out = "network.json";
    std::string report;             // defaults to <out>.report.json
};

inline int cmd_build(const BuildArgs& args, std::ostream& os = std::cout,
                     std::ostream& err = std::cerr) {
    try {
        HolderFunction f = make_test_function(args.fn, args.d, args.r);
        if (args.R) f.R = *args.R;
        BuildOptions opts;
        opts.domain_half_width = args.domain;
        opts.m_override = args.m_override;
        opts.c_override = args.c_override;
        BuildReport rep = full_approximator(f, args.eps, opts);
        const std::string report_path = args.report.empty() ? args.out + ".report.json" : args.report;
        write_file(args.out, save_network(rep.network));
        write_file(report_path, report_to_json(rep).dump(1));
        os << "built " << args.fn << " d=" << args.d << " r=" << format_double(args.r)
           << " eps=" << format_double(args.eps) << " M=" << rep.spec.M
           << " hidden=" << rep.measured.hidden_layers << " width=" << rep.measured.max_width
           << " weights=" << rep.measured.nonzero_weights << "\n";
        os << "network: " << args.out << "\nreport: " << report_path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "build: " << e.what() << "\n";
        return kExitInvalid;
    }
}

struct SweepArgs {
    std::string net_path;
    std::string report_path;
    std::string fn;
    std::optional<int> d;  // must match the network when given
    int points = 10000;
    std::uint64_t seed = 1;
    std::string out = "sweep.csv";
};

inline int cmd_sweep(const SweepArgs& args, std::ostream& os = std::cout,
                     std::ostream& err = std::cerr) {
    try {
        const Network net = load_network(read_file(args.net_path));
        const Json report = Json::parse(read_file(args.report_path));
        const double eps = report.at("eps").get<double>();
        const double domain = report.value("domain", 1.0);
        if (args.d && *args.d != net.input_dim())
            throw std::invalid_argument("function dimension " + std::to_string(*args.d) +
                                        " does not match network input dimension " +
                                        std::to_string(net.input_dim()));
        if (args.points < 0) throw std::invalid_argument("points must be nonnegative");
        const HolderFunction f = make_test_function(args.fn, net.input_dim(), report.value("r", 2.0));

        // sample the half-open user domain: [-a, a) per coordinate
        SweepResult result = sweep_network(
            net, [&](std::span<const double> x) { return f.value(x); }, args.points, args.seed,
            -domain, domain);
        write_file(args.out, sweep_to_csv(result, net.input_dim()));
        if (args.points == 0) {
            os << "no samples\n";
            return kExitOk;
        }
        const bool pass = result.max_abs_err <= eps;
        os << "max abs_err " << format_double(result.max_abs_err) << " vs eps "
           << format_double(eps) << ": " << (pass ? "PASS" : "FAIL") << "\n";
        return pass ? kExitOk : kExitFail;
    } catch (const std::exception& e) {
        err << "sweep: " << e.what() << "\n";
        return kExitInvalid;
    }
}

struct GadgetArgs {
    std::string name;
    int d = 1;
    int M = 2;
    int kappa = 1;
    int N = 1;
    double s = 1.0;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> weights;
    std::vector<int> exponents;
    std::vector<std::string> probe;  // numbers, or "at-center" for bump
    std::string save;
};

namespace detail {

inline std::vector<double> parse_probe(const std::vector<std::string>& probe) {
    std::vector<double> x;
    for (const std::string& tok : probe) x.push_back(std::stod(tok));
    return x;
}

}  // namespace detail

inline int cmd_gadget(const GadgetArgs& args, std::ostream& os = std::cout,
                      std::ostream& err = std::cerr) {
    try {
        std::optional<Network> net;
        std::vector<double> x;
        if (args.name == "product2") {
            net = product2();
            x = detail::parse_probe(args.probe);
        } else if (args.name == "product_d") {
            net = product_d(args.d);
            x = detail::parse_probe(args.probe);
        } else if (args.name == "identity") {
            net = identity_net(args.s);
            x = detail::parse_probe(args.probe);
        } else if (args.name == "indicator") {
            net = indicator_net(args.a, args.b, args.s);
            x = detail::parse_probe(args.probe);
        } else if (args.name == "polynomial") {
            net = polynomial_net(args.d, args.N, args.weights, args.s);
            x = detail::parse_probe(args.probe);
        } else if (args.name == "bump") {
            const PartitionPair pp = build_partitions(args.M, args.d, args.kappa);
            net = bump_net(pp);
            if (args.probe.size() == 1 && args.probe[0] == "at-center") {
                // center of the fine cube containing the origin
                const Cube cube = pp.locate_fine_cube(std::vector<double>(static_cast<std::size_t>(args.d), 0.0));
                for (double bl : cube.bottom_left) x.push_back(bl + 0.5 * cube.side);
            } else {
                x = detail::parse_probe(args.probe);
            }
        } else {
            err << "gadget: unknown gadget '" << args.name
                << "' (expected product2|product_d|identity|indicator|polynomial|bump)\n";
            return kExitInvalid;
        }
        if (static_cast<int>(x.size()) != net->input_dim())
            throw std::invalid_argument("probe has " + std::to_string(x.size()) + " values, gadget takes " +
                                        std::to_string(net->input_dim()));
        const std::vector<double> y = net->realize(x);
        os << "value:";
        for (double v : y) os << ' ' << format_double(v);
        os << "\n";
        const ComplexityReport rep = complexity(*net);
        os << "hidden_layers " << rep.hidden_layers << ", max_width " << rep.max_width
           << ", nonzero_weights " << rep.nonzero_weights << "\n";
        if (!args.save.empty()) {
            write_file(args.save, save_network(*net));
            os << "network: " << args.save << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "gadget: " << e.what() << "\n";
        return kExitInvalid;
    }
}

struct SqrtArgs {
    double t = 1.0;
    double eps = 0.1;
    int points = 1000;
};

inline int cmd_sqrt(const SqrtArgs& args, std::ostream& os = std::cout,
                    std::ostream& err = std::cerr) {
    try {
        if (args.points < 1) throw std::invalid_argument("points must be at least 1");
        const Network net = sqrt_net(args.t, args.eps);
        const int n = sqrt_iteration_count(args.t, args.eps);
        double max_err = 0.0;
        std::vector<double> x(1);
        for (int i = 0; i <= args.points; ++i) {
            x[0] = args.t * static_cast<double>(i) / args.points;
            max_err = std::max(max_err, std::abs(std::sqrt(x[0]) - net.realize_scalar(x)));
        }
        const ComplexityReport rep = complexity(net);
        const bool pass = max_err <= args.eps * (1.0 + 1e-9);
        os << "iterations " << n << ", hidden_layers " << rep.hidden_layers << ", max_width "
           << rep.max_width << ", nonzero_weights " << rep.nonzero_weights << "\n";
        os << "max |sqrt(x) - net(x)| on [0," << format_double(args.t)
           << "]: " << format_double(max_err) << " vs eps " << format_double(args.eps) << ": "
           << (pass ? "PASS" : "FAIL") << "\n";
        return pass ? kExitOk : kExitFail;
    } catch (const std::exception& e) {
        err << "sqrt: " << e.what() << "\n";
        return kExitInvalid;
    }
}

}  // namespace requforge::cli
