#include <benchmark/benchmark.h>

#include "sympol/correspondence.hpp"
#include "sympol/dgla.hpp"

using namespace sympol;

namespace {

DGLA bench_sl2() {
    DGLA L;
    L.basis = {{"h", 0, 0}, {"e", 0, 0}, {"f", 0, 0}};
    L.diff = QMatrix(3, 3);
    QVector v(3, Scalar(0));
    v[1] = Scalar(2);
    L.set_bracket_sym(0, 1, v);
    v = QVector(3, Scalar(0));
    v[2] = Scalar(-2);
    L.set_bracket_sym(0, 2, v);
    v = QVector(3, Scalar(0));
    v[0] = Scalar(1);
    L.set_bracket_sym(1, 2, v);
    return L;
}

CyclicPairing bench_killing() {
    CyclicPairing P;
    P.d = 0;
    P.pairing_weight = 0;
    P.matrix = QMatrix(3, 3);
    P.matrix.at(0, 0) = Scalar(8);
    P.matrix.at(1, 2) = Scalar(4);
    P.matrix.at(2, 1) = Scalar(4);
    return P;
}

Element dense_element(const FreeWCDGA& A, int order) {
    Element e = Element::unit();
    Element s;
    for (Generator g : A.gens) s += Element::generator(g);
    for (int i = 0; i < order; ++i) e = mul(e, s, &A.trunc);
    return e;
}

}  // namespace

static void BM_GradedProduct(benchmark::State& state) {
    Generator x = Generator::make(GenKind::base, "x", 0, 0);
    Generator y = Generator::make(GenKind::base, "y", -1, 0);
    Generator z = Generator::make(GenKind::base, "z", 0, 1);
    Trunc t;
    t.max_order = static_cast<int>(state.range(0));
    FreeWCDGA A = make_cdga({x, y, z}, {}, t);
    Element a = dense_element(A, static_cast<int>(state.range(0)) / 2);
    for (auto _ : state) {
        Element p = mul(a, a, &A.trunc);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_GradedProduct)->Arg(4)->Arg(8);

static void BM_SchoutenBracket(benchmark::State& state) {
    Generator x = Generator::make(GenKind::base, "x", 0, 0);
    Generator p = Generator::make(GenKind::base, "p", -1, 0);
    FreeWCDGA A = make_cdga({x, p}, {{p, Element::generator(x, 2)}});
    PolyContext C = make_poly_context(A, -1, 0, 4);
    Element pi = mul(Element::generator(C.xi[0]), Element::generator(C.xi[1]));
    Element f = dense_element(C.base, 3);
    for (auto _ : state) {
        Element b = schouten(C, pi, f);
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(BM_SchoutenBracket);

static void BM_KoszulHomology(benchmark::State& state) {
    Generator x = Generator::make(GenKind::base, "x", 0, 0);
    Generator y = Generator::make(GenKind::base, "y", -1, 0);
    Trunc t;
    t.max_order = static_cast<int>(state.range(0));
    FreeWCDGA A = make_cdga({x, y}, {{y, Element::generator(x, 2)}}, t);
    for (auto _ : state) {
        HomologySlice h = homology(A, 0, 0, static_cast<int>(state.range(0)) - 2);
        benchmark::DoNotOptimize(h.dimension);
    }
}
BENCHMARK(BM_KoszulHomology)->Arg(6)->Arg(10);

static void BM_FormalSymplecticToPoisson(benchmark::State& state) {
    DGLA L = bench_sl2();
    CyclicPairing K = bench_killing();
    for (auto _ : state) {
        CEAlgebra ce = ce_algebra(L, 3);
        PreSymplectic omega = formal_symplectic(L, K, ce, 0);
        PolyContext C = make_poly_context(ce.algebra, 2, 0, 3);
        Element pi = invert_two_form(C, omega.form(2));
        benchmark::DoNotOptimize(pi);
    }
}
BENCHMARK(BM_FormalSymplecticToPoisson);

static void BM_ObstructionSolver(benchmark::State& state) {
    Generator x0 = Generator::make(GenKind::base, "x", 0, 0);
    Trunc t;
    t.max_order = 6;
    FreeWCDGA B = make_cdga({x0}, {}, t);
    TwistedCotangent tc = generate_twisted_cotangent(B, Element::generator(x0, 3), -1, 0);
    PolyContext C = make_poly_context(tc.algebra, -1, 0, 4);
    for (auto _ : state) {
        CompatibilityWitness w = symplectic_to_poisson(C, tc.omega, 4);
        benchmark::DoNotOptimize(w.pi);
    }
}
BENCHMARK(BM_ObstructionSolver);

BENCHMARK_MAIN();
