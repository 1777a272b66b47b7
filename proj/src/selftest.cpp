#include "rgas/selftest.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "rgas/gas.hpp"
#include "rgas/kinetic.hpp"
#include "rgas/maxwell.hpp"
#include "rgas/pruning.hpp"
#include "rgas/stats.hpp"
#include "rgas/study.hpp"

namespace rgas {

namespace {

struct Runner {
    std::ostream& out;
    bool all_ok = true;

    void check(const std::string& name, const std::function<bool()>& fn) {
        bool ok = false;
        std::string note;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            note = std::string(" (") + e.what() + ")";
        }
        out << (ok ? "[PASS] " : "[FAIL] ") << name << note << '\n';
        all_ok = all_ok && ok;
    }
};

}  // namespace

bool run_selftest(std::ostream& out) {
    Runner r{out};

    r.check("torus displacement wraps across the seam", [] {
        Vec d = torus_displacement(Vec(0.9, 0.5), Vec(0.1, 0.5));
        return std::abs(d[0] - 0.2) < 1e-15 && std::abs(d[1]) < 1e-15;
    });

    r.check("collision law conserves momentum and energy (1e5 pairs)", [] {
        Philox rng(7, 100);
        for (int it = 0; it < 100000; ++it) {
            double eps = 0.01;
            Vec n = rng.unit_vector(2);
            PhasePoint zi{torus_reduce(Vec(0.5 + eps * n[0], 0.5 + eps * n[1])), Vec(2)};
            PhasePoint zj{Vec(0.5, 0.5), Vec(2)};
            zi.v = maxwellian_sample(1.0, 2, rng);
            zj.v = maxwellian_sample(1.0, 2, rng);
            if (torus_displacement(zj.x, zi.x).dot(zi.v - zj.v) >= 0) continue;
            auto [vi, vj] = collide(zi, zj, eps);
            Vec dp = (vi + vj) - (zi.v + zj.v);
            double de = 0.5 * (vi.norm2() + vj.norm2() - zi.v.norm2() - zj.v.norm2());
            if (std::abs(dp[0]) > 1e-12 || std::abs(dp[1]) > 1e-12 || std::abs(de) > 1e-12)
                return false;
        }
        return true;
    });

    r.check("gas run conserves energy and avoids overlap (N=32, t=1)", [] {
        ModelParams params{2, 1.0 / 32, 32, 1.0, false};
        Philox rng(11, 0);
        GasConfiguration cfg = init_equilibrium(params, Perturbation::constant(), rng);
        double e0 = cfg.total_energy();
        EventDrivenGas sim(std::move(cfg));
        double obs[] = {0.5, 1.0};
        TrajectoryRecord rec = sim.run(1.0, obs);
        double drift = std::abs(rec.energy.back() - e0) / e0;
        return drift < 1e-9 && rec.min_pair_distance >= params.eps * (1 - 1e-9);
    });

    r.check("velocity flip retraces the trajectory (N=20, t=0.5)", [] {
        ModelParams params{2, 1.0 / 20, 20, 1.0, false};
        Philox rng(13, 0);
        GasConfiguration cfg = init_equilibrium(params, Perturbation::constant(), rng);
        GasConfiguration start = cfg;
        EventDrivenGas sim(std::move(cfg));
        double obs1[] = {0.5};
        sim.run(0.5, obs1);
        sim.flip_velocities();
        double obs2[] = {1.0};
        sim.run(1.0, obs2);
        GasConfiguration end = sim.snapshot();
        for (int i = 0; i < params.n_particles; ++i)
            for (int k = 0; k < 2; ++k) {
                double dx = torus_displacement(end.phase[i].x, start.phase[i].x)[k];
                if (std::abs(dx) > 1e-6) return false;
                if (std::abs(end.phase[i].v[k] + start.phase[i].v[k]) > 1e-6) return false;
            }
        return true;
    });

    r.check("jump rate cache matches direct quadrature", [] {
        KineticModel model(KineticParams{2, 1.0});
        Philox rng(17, 0);
        for (int it = 0; it < 20; ++it) {
            double u = rng.uniform(0.0, 8.0);
            double a = model.total_rate_speed(u), b = model.total_rate_direct(u);
            if (std::abs(a - b) > 1e-8 * b) return false;
        }
        return true;
    });

    r.check("collisionless transport is exact", [] {
        KineticModel model(KineticParams{2, 1.0}, true);
        Philox rng(19, 0);
        PhasePoint z0{Vec(0.25, 0.75), Vec(1.25, -0.5)};
        PhasePoint z = model.evolve(z0, 2.0, rng);
        Vec want = torus_reduce(z0.x + 2.0 * z0.v);
        return torus_displacement(z.x, want).norm() < 1e-12 && (z.v - z0.v).norm() == 0.0;
    });

    r.check("dual-walk estimates respect the range of rho", [] {
        KineticModel model(KineticParams{2, 1.0});
        Perturbation rho = Perturbation::cosine(0.5);
        Philox rng(23, 0);
        PhiEstimate est = estimate_phi(model, Vec(0.3, 0.6), Vec(1.0, 0.0), 0.4, rho, 2000, rng);
        return est.min >= rho.inf() && est.max <= rho.sup() && est.mean > 0.0;
    });

    r.check("schedule sums to t and grows backward (K=12)", [] {
        PruningParams p;
        p.K = 12;
        p.alpha = 0.1;
        p.t = 1.0;
        Schedule s = build_schedule(p);
        double sum = 0;
        for (double h : s.h) sum += h;
        if (std::abs(sum - p.t) > 1e-12) return false;
        for (int i = 1; i < p.K; ++i)
            if (!(s.h[i] > s.h[i - 1])) return false;
        return std::abs(s.tp.back()) < 1e-15;
    });

    r.check("pruned-tail bound holds (K=10, alpha=0.25, C=1, t=1)", [] {
        PruningParams p;
        p.K = 10;
        p.alpha = 0.25;
        BoundReport rep = remainder_chain(p);
        return rep.holds;
    });

    r.check("fixed-horizon variant beats exp(-2^K) (K=8)", [] {
        return remark_chain(8, 1.0, 1.0).holds;
    });

    r.check("Gaussian moment identity (lambda=2, d=3, |v|=1)", [] {
        return gaussian_moment_identity(2.0, 3, 1.0).ok;
    });

    r.check("cut-count formula reproduces K=3 at eps=e^-100, c_beta=0.05", [] {
        return choose_K(std::exp(-100.0), 0.05).K == 3;
    });

    r.check("replica streams replay and decorrelate", [] {
        Philox a = seed_stream(42, 1), b = seed_stream(42, 1), c = seed_stream(42, 2);
        std::vector<double> xs, ys;
        for (int i = 0; i < 4096; ++i) {
            double x = a.uniform();
            if (x != b.uniform()) return false;
            xs.push_back(x);
            ys.push_back(c.uniform());
        }
        return std::abs(pearson_correlation(xs, ys)) < 0.05;
    });

    out << (r.all_ok ? "selftest: all checks passed\n" : "selftest: FAILURES above\n");
    return r.all_ok;
}

}  // namespace rgas
