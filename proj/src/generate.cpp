#include "tlra/generate.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "tlra/amm.hpp"

namespace tlra {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

std::vector<int> parse_dims(const std::string& s) {
    std::vector<int> dims;
    for (const auto& part : split(s, 'x')) {
        try {
            dims.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw DimensionError("generator: bad extent list '" + s + "'");
        }
        if (dims.back() < 1) throw DimensionError("generator: extents must be positive");
    }
    if (dims.empty()) throw DimensionError("generator: empty extent list");
    return dims;
}

Tensor gaussian_tensor(const std::vector<int>& shape, std::mt19937_64& rng) {
    Tensor t(shape);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = gauss(rng);
    return t;
}

}  // namespace

GeneratorSpec parse_generator_spec(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw DimensionError("generator: expected name(args), got '" + text + "'");
    const std::string name = text.substr(0, open);
    const auto args = split(text.substr(open + 1, close - open - 1), ',');

    GeneratorSpec spec;
    try {
        if (name == "gaussian") {
            if (args.size() != 2) throw DimensionError("generator: gaussian(shape,seed)");
            spec.kind = GeneratorSpec::Kind::gaussian;
            spec.shape = parse_dims(args[0]);
            spec.seed = std::stoull(args[1]);
        } else if (name == "lowrank") {
            if (args.size() != 4)
                throw DimensionError("generator: lowrank(shape,ranks,sigma,seed)");
            spec.kind = GeneratorSpec::Kind::lowrank;
            spec.shape = parse_dims(args[0]);
            spec.ranks = parse_dims(args[1]);
            spec.noise = std::stod(args[2]);
            spec.seed = std::stoull(args[3]);
        } else if (name == "composite-cur") {
            if (args.size() != 3)
                throw DimensionError("generator: composite-cur(shape,k,seed)");
            spec.kind = GeneratorSpec::Kind::composite_cur;
            spec.shape = parse_dims(args[0]);
            spec.k = std::stoi(args[1]);
            spec.seed = std::stoull(args[2]);
        } else {
            throw DimensionError("generator: unknown kind '" + name + "'");
        }
    } catch (const DimensionError&) {
        throw;
    } catch (const std::exception&) {
        throw DimensionError("generator: bad arguments in '" + text + "'");
    }

    if (spec.kind == GeneratorSpec::Kind::lowrank) {
        if (spec.ranks.size() != spec.shape.size())
            throw DimensionError("generator: one rank per mode required");
        for (std::size_t i = 0; i < spec.ranks.size(); ++i)
            if (spec.ranks[i] < 1 || spec.ranks[i] > spec.shape[i])
                throw DimensionError("generator: rank out of range");
        if (spec.noise < 0.0) throw DimensionError("generator: noise must be >= 0");
    }
    if (spec.kind == GeneratorSpec::Kind::composite_cur && spec.k < 1)
        throw DimensionError("generator: k must be positive");
    return spec;
}

Tensor generate(const GeneratorSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    switch (spec.kind) {
        case GeneratorSpec::Kind::gaussian:
            return gaussian_tensor(spec.shape, rng);

        case GeneratorSpec::Kind::lowrank: {
            Tensor core = gaussian_tensor(spec.ranks, rng);
            std::normal_distribution<double> gauss(0.0, 1.0);
            Tensor t = core;
            for (std::size_t m = 0; m < spec.shape.size(); ++m) {
                Eigen::MatrixXd raw(spec.shape[m], spec.ranks[m]);
                for (Eigen::Index c = 0; c < raw.cols(); ++c)
                    for (Eigen::Index r = 0; r < raw.rows(); ++r) raw(r, c) = gauss(rng);
                t = mode_multiply(t, orthonormalize(raw).basis, static_cast<int>(m));
            }
            if (spec.noise > 0.0)
                for (std::size_t i = 0; i < t.size(); ++i)
                    t[i] += spec.noise * gauss(rng);
            return t;
        }

        case GeneratorSpec::Kind::composite_cur: {
            // multilinear ranks sized so every sampled pivot block of the
            // nested skeleton construction has full rank
            const int d = static_cast<int>(spec.shape.size());
            GeneratorSpec low = spec;
            low.kind = GeneratorSpec::Kind::lowrank;
            low.noise = 0.0;
            low.ranks.assign(spec.shape.size(), spec.k);
            if (d == 3)
                low.ranks[0] = std::min(spec.shape[0], spec.k * spec.k);
            else if (d != 2 && d != 4)
                throw DimensionError("generator: composite-cur needs 2 to 4 modes");
            for (int m = 0; m < d; ++m)
                low.ranks[static_cast<std::size_t>(m)] =
                    std::min(low.ranks[static_cast<std::size_t>(m)],
                             spec.shape[static_cast<std::size_t>(m)]);
            return generate(low);
        }
    }
    throw DimensionError("generator: unreachable kind");
}

Tensor generate(const std::string& spec) { return generate(parse_generator_spec(spec)); }

}  // namespace tlra
