#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <functional>

#include "cadence/io/checkpoint.hpp"
#include "cadence/nn/adam.hpp"
#include "cadence/nn/mlp.hpp"
#include "cadence/nn/ops.hpp"
#include "cadence/nn/param_vector.hpp"
#include "cadence/nn/tape.hpp"

using namespace cadence;
using namespace cadence::nn;

namespace {

// Central finite differences of a scalar loss over all parameters.
std::vector<double> fd_grad(ParamVector& p, const std::function<double()>& loss,
                            double h = 1e-5) {
    std::vector<double> g(p.size());
    auto flat = p.flat();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double keep = flat[i];
        flat[i] = keep + h;
        const double up = loss();
        flat[i] = keep - h;
        const double dn = loss();
        flat[i] = keep;
        g[i] = (up - dn) / (2.0 * h);
    }
    return g;
}

double max_rel_err(VecView a, VecView b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1e-6});
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

} // namespace

TEST_CASE("mlp with all-zero parameters outputs the zero vector") {
    MlpSpec spec{3, 2, {5}, Activation::tanh};
    ParamVector p;
    add_mlp_params(p, "net", spec);
    auto y = mlp_forward(spec, p, "net", std::vector<double>{0.3, -0.7, 1.1});
    for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("tiny-weight tanh mlp matches the composed linear map to O(eps^3)") {
    const double eps = 1e-4;
    MlpSpec spec{2, 2, {2}, Activation::tanh};
    ParamVector p;
    add_mlp_params(p, "net", spec);
    // W0 = eps * A, W1 = C; linearization: y ~= C (eps A x).
    const double A[4] = {0.5, -0.3, 0.8, 0.2};
    const double C[4] = {1.0, 2.0, -1.0, 0.5};
    auto W0 = p.view("net.W0");
    auto W1 = p.view("net.W1");
    for (int i = 0; i < 4; ++i) {
        W0[i] = eps * A[i];
        W1[i] = C[i];
    }
    const std::vector<double> x{0.7, -0.4};
    auto y = mlp_forward(spec, p, "net", x);
    for (int i = 0; i < 2; ++i) {
        double lin = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double hk = eps * (A[2 * k] * x[0] + A[2 * k + 1] * x[1]);
            lin += C[2 * i + k] * hk;
        }
        CHECK(std::abs(y[i] - lin) < 10.0 * eps * eps * eps);
    }
}

TEST_CASE("seeded init is reproducible and forward is deterministic") {
    MlpSpec spec{4, 3, {8, 8}, Activation::swish};
    ParamVector p1, p2;
    add_mlp_params(p1, "net", spec);
    add_mlp_params(p2, "net", spec);
    Rng r1(1234), r2(1234);
    init_mlp_params(p1, "net", spec, r1);
    init_mlp_params(p2, "net", spec, r2);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1.flat()[i] == p2.flat()[i]);
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
    auto y1 = mlp_forward(spec, p1, "net", x);
    auto y2 = mlp_forward(spec, p2, "net", x);
    for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == y2[i]);
}

TEST_CASE("mlp dimension mismatch names the layer") {
    MlpSpec spec{3, 2, {4}, Activation::tanh};
    ParamVector p;
    add_mlp_params(p, "net", spec);
    try {
        mlp_forward(spec, p, "net", std::vector<double>{1.0, 2.0});
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        CHECK(std::string(e.what()).find("layer 0") != std::string::npos);
    }
}

TEST_CASE("grad of |p|^2/2 equals p") {
    ParamVector p;
    p.add("w", {5});
    Rng rng(7);
    for (auto& v : p.view("w")) v = rng.normal();
    auto g = tape::grad(p, [](tape::Tape& t) {
        return t.scale(t.sumsq(t.param_all()), 0.5);
    });
    for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(std::abs(g[i] - p.flat()[i]) < 1e-14);
}

TEST_CASE("grad of a constant loss is zero") {
    ParamVector p;
    p.add("w", {4});
    auto g = tape::grad(p, [](tape::Tape& t) { return t.constant(3.5); });
    for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("tape gradient of a random 2-layer mlp matches finite differences") {
    MlpSpec spec{3, 2, {6}, Activation::tanh};
    ParamVector p;
    add_mlp_params(p, "net", spec);
    Rng rng(42);
    init_mlp_params(p, "net", spec, rng);
    const std::vector<double> x{0.3, -1.2, 0.8};

    auto build = [&](tape::Tape& t) { return t.sum(t.mlp("net", spec, t.input(x))); };
    auto g = tape::grad(p, build);
    auto fd = fd_grad(p, [&] {
        double s = 0.0;
        for (double v : mlp_forward(spec, p, "net", x)) s += v;
        return s;
    });
    CHECK(max_rel_err(g, fd) < 1e-4);
}

TEST_CASE("gradient check: 50 random mlp configurations vs central differences") {
    Rng meta(2024);
    for (int trial = 0; trial < 50; ++trial) {
        MlpSpec spec;
        spec.input_dim = 1 + meta.below(4);
        spec.output_dim = 1 + meta.below(3);
        const int depth = 1 + static_cast<int>(meta.below(2));
        for (int l = 0; l < depth; ++l) spec.hidden.push_back(2 + meta.below(6));
        spec.activation = meta.below(2) == 0 ? Activation::tanh : Activation::swish;

        ParamVector p;
        add_mlp_params(p, "net", spec);
        Rng init(1000 + trial);
        init_mlp_params(p, "net", spec, init);
        std::vector<double> x(spec.input_dim);
        for (auto& v : x) v = init.normal();
        std::vector<double> coef(spec.output_dim);
        for (auto& v : coef) v = init.normal();

        // loss = coef . mlp(x), exercised through both engines.
        auto g_tape = tape::grad(p, [&](tape::Tape& t) {
            return t.dot(t.input(coef), t.mlp("net", spec, t.input(x)));
        });

        auto view = MlpView::make(p, "net", spec);
        MlpCache cache;
        std::vector<double> y(spec.output_dim);
        mlp_forward(view, p.flat(), x, y, &cache);
        std::vector<double> g_manual(p.size(), 0.0);
        std::vector<double> dx(spec.input_dim, 0.0);
        mlp_backward(view, p.flat(), cache, coef, g_manual, dx);

        auto fd = fd_grad(p, [&] {
            auto out = mlp_forward(spec, p, "net", x);
            double s = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i) s += coef[i] * out[i];
            return s;
        });

        CHECK(max_rel_err(g_tape, fd) < 1e-4);
        CHECK(max_rel_err(g_manual, fd) < 1e-4);
        CHECK(max_rel_err(g_tape, g_manual) < 1e-10);
    }
}

TEST_CASE("softmax_tau basics") {
    SUBCASE("equal logits give the uniform vector") {
        auto a = softmax_tau(std::vector<double>{2.2, 2.2, 2.2}, 0.37);
        for (double v : a) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-12));
    }
    SUBCASE("(2,1,0) at tau=1") {
        auto a = softmax_tau(std::vector<double>{2.0, 1.0, 0.0}, 1.0);
        CHECK(std::abs(a[0] - 0.66524) < 1e-5);
        CHECK(std::abs(a[1] - 0.24473) < 1e-5);
        CHECK(std::abs(a[2] - 0.09003) < 1e-5);
    }
    SUBCASE("tau -> 0 recovers the hard assignment") {
        auto a = softmax_tau(std::vector<double>{2.0, 1.0, 0.0}, 1e-6);
        CHECK(std::abs(a[0] - 1.0) < 1e-9);
        CHECK(a[1] < 1e-9);
        CHECK(a[2] < 1e-9);
    }
    SUBCASE("non-positive temperature is rejected") {
        CHECK_THROWS_AS(softmax_tau(std::vector<double>{1.0}, 0.0), InvalidArgumentError);
        CHECK_THROWS_AS(softmax_tau(std::vector<double>{1.0}, -1.0), InvalidArgumentError);
    }
    SUBCASE("sums to one within 1e-12 and entries positive") {
        Rng rng(5);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> v(1 + rng.below(8));
            // keep (max gap)/tau below the exp underflow threshold so
            // positivity is representable
            for (auto& x : v) x = rng.uniform(-30.0, 30.0);
            auto a = softmax_tau(v, std::exp(rng.uniform(-1.5, 2.0)));
            double s = 0.0;
            for (double x : a) {
                CHECK(x > 0.0);
                s += x;
            }
            CHECK(std::abs(s - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("softmax entropy is monotone non-decreasing in tau") {
    Rng rng(99);
    const std::vector<double> taus{0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 20.0};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(2 + rng.below(6));
        for (auto& x : v) x = rng.uniform(-4.0, 4.0);
        // ensure a unique maximizer
        std::size_t arg = 0;
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] > v[arg]) arg = i;
        v[arg] += 0.1;
        double prev = -1.0;
        for (double tau : taus) {
            const double h = entropy(softmax_tau(v, tau));
            CHECK(h >= prev - 1e-12);
            prev = h;
        }
    }
}

TEST_CASE("softmax shift invariance is exact on representable grids") {
    Rng rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(2 + rng.below(5));
        // values on a 2^-20 grid keep v + c exactly representable
        for (auto& x : v)
            x = static_cast<double>(static_cast<long long>(rng.uniform(-30.0, 30.0) * (1 << 20))) /
                (1 << 20);
        const double c = static_cast<double>(static_cast<int>(rng.below(200))) - 100.0;
        std::vector<double> shifted(v);
        for (auto& x : shifted) x += c;
        auto a = softmax_tau(v, 0.7);
        auto b = softmax_tau(shifted, 0.7);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("film modulation") {
    ParamVector p;
    add_film_params(p, "film", 2, 3);
    const std::vector<double> w{0.4, -0.2, 0.9};
    const std::vector<double> feats{3.0, 4.0};

    SUBCASE("identity heads pass features through") {
        auto g0 = p.view("film.g0");
        g0[0] = 1.0;
        g0[1] = 1.0;
        auto y = film(feats, w, p);
        CHECK(y[0] == 3.0);
        CHECK(y[1] == 4.0);
    }
    SUBCASE("zero gamma ignores features") {
        auto b0 = p.view("film.b0");
        b0[0] = -2.5;
        b0[1] = 7.0;
        auto y = film(feats, w, p);
        CHECK(y[0] == -2.5);
        CHECK(y[1] == 7.0);
        auto y2 = film(std::vector<double>{100.0, -100.0}, w, p);
        CHECK(y2[0] == -2.5);
        CHECK(y2[1] == 7.0);
    }
    SUBCASE("hand-evaluated modulation") {
        auto g0 = p.view("film.g0");
        auto b0 = p.view("film.b0");
        g0[0] = 2.0;
        g0[1] = 2.0;
        b0[0] = 1.0;
        b0[1] = -1.0;
        auto y = film(feats, w, p);
        CHECK(y[0] == 7.0);
        CHECK(y[1] == 7.0);
    }
}

TEST_CASE("film backward matches finite differences") {
    ParamVector p;
    add_film_params(p, "film", 3, 2);
    Rng rng(31);
    for (auto& v : p.flat()) v = rng.normal();
    const std::vector<double> w{0.7, -1.1};
    const std::vector<double> feats{0.3, 0.9, -0.5};
    const std::vector<double> seed{1.0, -2.0, 0.5};

    auto loss = [&] {
        auto y = film(feats, w, p);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += seed[i] * y[i];
        return s;
    };
    auto fd = fd_grad(p, loss);

    const auto fv = FilmView::make(p, "film");
    std::vector<double> gamma(3), beta(3), dgamma(3, 0.0), dbeta(3, 0.0);
    film_heads(fv, p.flat(), w, gamma, beta);
    std::vector<double> dfeat(3, 0.0), dw(2, 0.0), dflat(p.size(), 0.0);
    film_apply_backward(feats, gamma, seed, dfeat, dgamma, dbeta);
    film_heads_backward(fv, p.flat(), w, dgamma, dbeta, dflat, dw);
    CHECK(max_rel_err(dflat, fd) < 1e-6);
}

TEST_CASE("optimizer_step") {
    SUBCASE("zero gradient leaves parameters unchanged") {
        std::vector<double> p{1.0, -2.0, 3.0};
        std::vector<double> g{0.0, 0.0, 0.0};
        AdamState st;
        auto before = p;
        CHECK(optimizer_step(p, g, st, 1e-2));
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == before[i]);
    }
    SUBCASE("quadratic oracle converges") {
        Rng rng(17);
        std::vector<double> target(6), p(6);
        for (auto& v : target) v = rng.normal();
        for (auto& v : p) v = rng.normal();
        AdamState st;
        std::vector<double> g(6);
        for (int step = 0; step < 2000; ++step) {
            for (std::size_t i = 0; i < p.size(); ++i) g[i] = 2.0 * (p[i] - target[i]);
            optimizer_step(p, g, st, 1e-2);
        }
        double dist = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            dist += (p[i] - target[i]) * (p[i] - target[i]);
        CHECK(std::sqrt(dist) < 1e-4);
    }
    SUBCASE("same seed gives bit-identical trajectories") {
        for (int run = 0; run < 2; ++run) {
            static std::vector<double> first;
            Rng rng(5);
            std::vector<double> p(4), g(4);
            for (auto& v : p) v = rng.normal();
            AdamState st;
            for (int step = 0; step < 50; ++step) {
                for (std::size_t i = 0; i < p.size(); ++i)
                    g[i] = std::sin(p[i]) + rng.normal() * 0.0; // deterministic
                optimizer_step(p, g, st, 3e-3);
            }
            if (run == 0)
                first = p;
            else
                for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == first[i]);
        }
    }
    SUBCASE("non-finite gradient is rejected and state preserved") {
        std::vector<double> p{1.0, 2.0};
        AdamState st;
        std::vector<double> g{0.5, -0.5};
        optimizer_step(p, g, st, 1e-2);
        const auto m_before = st.m;
        const auto p_before = p;
        g[1] = std::nan("");
        CHECK_FALSE(optimizer_step(p, g, st, 1e-2));
        CHECK(p == p_before);
        CHECK(st.m == m_before);
    }
}

TEST_CASE("ParamVector layout covers the flat vector without overlap") {
    ParamVector p;
    p.add("a", {2, 3});
    p.add("b", {4});
    p.add("c", {1});
    std::size_t expect = 0;
    for (std::size_t i = 0; i < p.tensor_count(); ++i) {
        CHECK(p.tensor(i).offset == expect);
        expect += p.tensor(i).size;
    }
    CHECK(expect == p.size());
    CHECK_THROWS_AS(p.add("a", {1}), InvalidArgumentError);
}

TEST_CASE("ParamVector save/load round trip is bit-exact") {
    ParamVector p;
    p.add("layer.W", {7, 3});
    p.add("layer.b", {7});
    Rng rng(77);
    for (auto& v : p.flat()) v = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
    p.flat()[0] = 0.1 + 0.2; // classic non-representable sum
    const std::string path = "/tmp/cadence_test_params.ckpt";
    io::save_params(p, path);
    auto q = io::load_params(path);
    REQUIRE(q.size() == p.size());
    CHECK(q.layout_matches(p));
    for (std::size_t i = 0; i < p.size(); ++i) {
        // bit-level comparison
        CHECK(std::memcmp(&p.flat()[i], &q.flat()[i], sizeof(double)) == 0);
    }
    std::remove(path.c_str());
}

TEST_CASE("checkpoint with metadata round trips") {
    io::Checkpoint ck;
    ParamVector p;
    p.add("w", {3});
    p.view("w")[1] = 0.5;
    ck.params.emplace("model", p);
    ck.meta_real["tau"] = 0.125;
    ck.meta_int["step"] = 42;
    ck.meta_str["mode"] = "cross";
    const std::string path = "/tmp/cadence_test_ck.ckpt";
    ck.save(path);
    auto lk = io::Checkpoint::load(path);
    CHECK(lk.params.at("model").view("w")[1] == 0.5);
    CHECK(lk.meta_real.at("tau") == 0.125);
    CHECK(lk.meta_int.at("step") == 42);
    CHECK(lk.meta_str.at("mode") == "cross");
    std::remove(path.c_str());
}
