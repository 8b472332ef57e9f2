// Infeasible-start primal-dual path following on real symmetric blocks.
//
//   (P) min <C, X>  s.t. <A_k, X> = b_k, X ⪰ 0
//   (D) max b'y     s.t. Σ y_k A_k + Z = C, Z ⪰ 0
//
// Nesterov–Todd scaling, Mehrotra predictor-corrector.

use alloc::vec;
use alloc::vec::Vec;

use super::dense::{cholesky, cholesky_solve, min_eigenvalue, svd, DMat};
use super::{SdpSettings, SdpStatus};
use crate::math;

/// A constraint as lists of full (both triangles) sparse entries per block.
#[derive(Clone, Debug)]
pub(crate) struct RealConstraint {
    pub parts: Vec<(usize, Vec<(usize, usize, f64)>)>,
}

#[derive(Clone, Debug)]
pub(crate) struct RealSdp {
    pub dims: Vec<usize>,
    pub c: Vec<DMat>,
    pub a: Vec<RealConstraint>,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct IpmOutput {
    pub status: SdpStatus,
    pub x: Vec<DMat>,
    pub z: Vec<DMat>,
    pub y: Vec<f64>,
    pub pobj: f64,
    pub dobj: f64,
    pub pinf: f64,
    pub dinf: f64,
    pub iterations: usize,
}

struct Scaling {
    g: DMat,
    ginv: DMat,
    w: DMat,
    s: Vec<f64>,
}

struct Direction {
    dx: Vec<DMat>,
    dz: Vec<DMat>,
    dy: Vec<f64>,
}

impl RealSdp {
    fn a_op(&self, x: &[DMat]) -> Vec<f64> {
        self.a
            .iter()
            .map(|con| con.parts.iter().map(|(blk, ents)| ents.iter().map(|&(i, j, v)| v * x[*blk].get(i, j)).sum::<f64>()).sum())
            .collect()
    }

    fn at_op(&self, y: &[f64]) -> Vec<DMat> {
        let mut out: Vec<DMat> = self.dims.iter().map(|&n| DMat::zeros(n)).collect();
        for (con, &yk) in self.a.iter().zip(y) {
            if yk == 0.0 {
                continue;
            }
            for (blk, ents) in &con.parts {
                for &(i, j, v) in ents {
                    out[*blk].add_at(i, j, yk * v);
                }
            }
        }
        out
    }

    fn touching(&self) -> Vec<Vec<(usize, usize)>> {
        // For every block, (constraint index, part index) pairs in constraint order.
        let mut t = vec![Vec::new(); self.dims.len()];
        for (k, con) in self.a.iter().enumerate() {
            for (pi, (blk, _)) in con.parts.iter().enumerate() {
                t[*blk].push((k, pi));
            }
        }
        t
    }

    fn schur(&self, scal: &[Scaling], touch: &[Vec<(usize, usize)>]) -> DMat {
        let m = self.a.len();
        let mut s = DMat::zeros(m);
        for (blk, list) in touch.iter().enumerate() {
            let n = self.dims[blk];
            let w = &scal[blk].w;
            for (pos, &(l, pl)) in list.iter().enumerate() {
                let ents_l = &self.a[l].parts[pl].1;
                // G = W A_l W
                let g = if ents_l.len() <= 2 * n {
                    let mut g = DMat::zeros(n);
                    for &(i, j, v) in ents_l {
                        for p in 0..n {
                            let wpi = v * w.get(p, i);
                            if wpi == 0.0 {
                                continue;
                            }
                            let row = &mut g.d[p * n..(p + 1) * n];
                            let wj = &w.d[j * n..(j + 1) * n];
                            for (gq, wjq) in row.iter_mut().zip(wj) {
                                *gq += wpi * wjq;
                            }
                        }
                    }
                    g
                } else {
                    let mut a = DMat::zeros(n);
                    for &(i, j, v) in ents_l {
                        a.add_at(i, j, v);
                    }
                    w.matmul(&a).matmul(w)
                };
                for &(k, pk) in &list[pos..] {
                    let val: f64 = self.a[k].parts[pk].1.iter().map(|&(p, q, u)| u * g.get(p, q)).sum();
                    s.add_at(k, l, val);
                }
            }
        }
        for k in 0..m {
            for l in 0..k {
                let v = s.get(k, l);
                s.set(l, k, v);
            }
        }
        s
    }
}

fn block_dot(a: &[DMat], b: &[DMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn norm2(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

fn blocks_norm(v: &[DMat]) -> f64 {
    math::sqrt(v.iter().map(|m| m.fro_sq()).sum())
}

fn nt_scaling(x: &DMat, z: &DMat) -> Option<Scaling> {
    let lx = cholesky(x)?;
    let lz = cholesky(z)?;
    let t = lz.transpose().matmul(&lx);
    let (u, s, v) = svd(&t);
    if s.iter().any(|&si| !(si > 0.0) || !si.is_finite()) {
        return None;
    }
    let n = x.n;
    let inv_sqrt: Vec<f64> = s.iter().map(|&si| 1.0 / math::sqrt(si)).collect();
    // G = L_X V Σ^{-1/2}, G^{-1} = Σ^{-1/2} Uᵀ L_Zᵀ
    let lxv = lx.matmul(&v);
    let mut g = DMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, lxv.get(i, j) * inv_sqrt[j]);
        }
    }
    let utlzt = u.transpose().matmul(&lz.transpose());
    let mut ginv = DMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            ginv.set(i, j, inv_sqrt[i] * utlzt.get(i, j));
        }
    }
    let mut w = g.matmul(&g.transpose());
    w.symmetrize();
    Some(Scaling { g, ginv, w, s })
}

/// Solves `S x = b` given the Cholesky factor of (a regularization of)
/// `D S D`, `D = diag(equil)`, with a few rounds of iterative refinement
/// against `S` itself.
fn refined_solve(s: &DMat, chol: &DMat, equil: &[f64], b: &[f64]) -> Vec<f64> {
    let m = b.len();
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut v: Vec<f64> = rhs.iter().zip(equil).map(|(r, d)| r * d).collect();
        cholesky_solve(chol, &mut v);
        v.iter().zip(equil).map(|(v, d)| v * d).collect()
    };
    let mut x = solve(b);
    let residual = |x: &[f64]| -> Vec<f64> { (0..m).map(|i| b[i] - (0..m).map(|j| s.get(i, j) * x[j]).sum::<f64>()).collect() };
    let mut r = residual(&x);
    let mut rn = norm2(&r);
    for _ in 0..3 {
        if rn == 0.0 {
            break;
        }
        let c = solve(&r);
        let cand: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a + b).collect();
        let rc = residual(&cand);
        let rcn = norm2(&rc);
        if !(rcn < rn) {
            break;
        }
        x = cand;
        r = rc;
        rn = rcn;
    }
    x
}

/// Largest α with `Σ + α D ⪰ 0` for diagonal `Σ`.
fn max_step(s: &[f64], d: &DMat) -> f64 {
    let n = d.n;
    let mut m = DMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, d.get(i, j) / math::sqrt(s[i] * s[j]));
        }
    }
    let lmin = min_eigenvalue(&m);
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

pub(crate) fn solve(p: &RealSdp, settings: &SdpSettings) -> IpmOutput {
    let m = p.a.len();
    let nblocks = p.dims.len();
    let total_dim: usize = p.dims.iter().sum();
    let touch = p.touching();

    let b_norm = norm2(&p.b);
    let c_norm = blocks_norm(&p.c);

    // Identity-scaled starting point.
    let mut x = Vec::with_capacity(nblocks);
    let mut z = Vec::with_capacity(nblocks);
    for (blk, &n) in p.dims.iter().enumerate() {
        let nf = n as f64;
        let mut xi: f64 = 10.0f64.max(math::sqrt(nf));
        let mut zeta: f64 = 10.0f64.max(math::sqrt(nf)).max(math::sqrt(p.c[blk].fro_sq()));
        for &(k, pi) in &touch[blk] {
            let list = &p.a[k].parts[pi].1;
            let an = math::sqrt(list.iter().map(|&(_, _, v)| v * v).sum::<f64>());
            xi = xi.max(nf * (1.0 + p.b[k].abs()) / (1.0 + an));
            zeta = zeta.max(an);
        }
        x.push(DMat::scaled_identity(n, xi));
        z.push(DMat::scaled_identity(n, zeta));
    }
    let mut y = vec![0.0; m];

    let mut gamma = 0.9;
    let mut last: Option<IpmOutput> = None;
    let mut stalls = 0;
    let mut done = 0;

    for iter in 0..=settings.max_iterations {
        done = iter;
        let ax = p.a_op(&x);
        let rp: Vec<f64> = p.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = p.at_op(&y);
        let rd: Vec<DMat> = (0..nblocks).map(|blk| p.c[blk].sub(&z[blk]).sub(&aty[blk])).collect();
        let pobj = block_dot(&p.c, &x);
        let dobj: f64 = p.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let xz = block_dot(&x, &z);
        let mu = xz / total_dim as f64;
        let pinf = norm2(&rp) / (1.0 + b_norm);
        let dinf = blocks_norm(&rd) / (1.0 + c_norm);
        let scale = 1.0 + pobj.abs();
        let relgap = (pobj - dobj).abs().max(xz) / scale;

        let snapshot = |status| IpmOutput {
            status,
            x: x.clone(),
            z: z.clone(),
            y: y.clone(),
            pobj,
            dobj,
            pinf,
            dinf,
            iterations: iter,
        };

        #[cfg(test)]
        if settings.trace {
            std::eprintln!("it {iter:3} pobj {pobj:+.10e} dobj {dobj:+.10e} pinf {pinf:.2e} dinf {dinf:.2e} relgap {relgap:.2e} mu {mu:.2e} g {gamma:.3}");
        }
        let meets_spec = pinf <= settings.feas_tol && dinf <= settings.feas_tol && relgap <= settings.gap_tol;
        if meets_spec {
            last = Some(snapshot(SdpStatus::Optimal));
        }
        if pinf <= settings.target_feas && dinf <= settings.target_feas && relgap <= settings.target_gap {
            return snapshot(SdpStatus::Optimal);
        }

        // Infeasibility certificates from diverging iterates.
        if dobj > 0.0 {
            let resid = blocks_norm(&(0..nblocks).map(|blk| {
                let mut t = aty[blk].clone();
                t.axpy(1.0, &z[blk]);
                t
            }).collect::<Vec<_>>());
            if resid <= settings.infeas_tol * dobj && dobj > 1e4 {
                return snapshot(SdpStatus::Infeasible);
            }
        }
        if pobj < 0.0 {
            let resid = norm2(&ax);
            if resid <= settings.infeas_tol * (-pobj) && -pobj > 1e4 {
                return snapshot(SdpStatus::Unbounded);
            }
        }
        if iter == settings.max_iterations {
            break;
        }

        let scal: Option<Vec<Scaling>> = (0..nblocks).map(|blk| nt_scaling(&x[blk], &z[blk])).collect();
        let Some(scal) = scal else { break };

        let schur0 = p.schur(&scal, &touch);
        // Factor the unit-diagonal equilibration D S D.
        let equil: Vec<f64> = (0..m).map(|k| schur0.get(k, k)).map(|d| if d > 0.0 { 1.0 / math::sqrt(d) } else { 1.0 }).collect();
        let mut schur = DMat::zeros(m);
        for i in 0..m {
            for j in 0..m {
                schur.set(i, j, schur0.get(i, j) * equil[i] * equil[j]);
            }
        }
        let mut chol = cholesky(&schur);
        let mut reg = 0.0;
        let max_diag = (0..m).map(|k| schur.get(k, k).abs()).fold(0.0, f64::max).max(1e-300);
        while chol.is_none() && reg < 1e-6 * max_diag {
            reg = if reg == 0.0 { 1e-14 * max_diag } else { reg * 100.0 };
            for k in 0..m {
                schur.add_at(k, k, reg);
            }
            chol = cholesky(&schur);
        }
        let Some(chol) = chol else { break };

        let wrdw: Vec<DMat> = (0..nblocks).map(|blk| scal[blk].w.congruence(&rd[blk])).collect();
        let solve_dir = |rc: Vec<DMat>| -> Direction {
            let tmp: Vec<DMat> = (0..nblocks).map(|blk| rc[blk].sub(&wrdw[blk])).collect();
            let atmp = p.a_op(&tmp);
            let rhs: Vec<f64> = rp.iter().zip(&atmp).map(|(r, a)| r - a).collect();
            let direction = |dy: Vec<f64>| -> Direction {
                let atdy = p.at_op(&dy);
                let dz: Vec<DMat> = (0..nblocks).map(|blk| rd[blk].sub(&atdy[blk])).collect();
                let dx: Vec<DMat> = (0..nblocks)
                    .map(|blk| {
                        let mut d = rc[blk].sub(&scal[blk].w.congruence(&dz[blk]));
                        d.symmetrize();
                        d
                    })
                    .collect();
                Direction { dx, dz, dy }
            };
            // Refinement against the residual of A(ΔX) = r_p itself.
            let mut dir = direction(refined_solve(&schur0, &chol, &equil, &rhs));
            let defect = |d: &Direction| -> Vec<f64> { rp.iter().zip(p.a_op(&d.dx)).map(|(r, a)| r - a).collect() };
            let mut e = defect(&dir);
            let mut en = norm2(&e);
            for _ in 0..3 {
                if en <= 1e-15 * (1.0 + b_norm) {
                    break;
                }
                let c = refined_solve(&schur0, &chol, &equil, &e);
                let cand = direction(dir.dy.iter().zip(&c).map(|(a, b)| a + b).collect());
                let ec = defect(&cand);
                let ecn = norm2(&ec);
                if !(ecn < en) {
                    break;
                }
                dir = cand;
                e = ec;
                en = ecn;
            }
            dir
        };
        let steps = |dir: &Direction| -> (f64, f64, Vec<DMat>, Vec<DMat>) {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            let mut dxt_all = Vec::with_capacity(nblocks);
            let mut dzt_all = Vec::with_capacity(nblocks);
            for blk in 0..nblocks {
                let sc = &scal[blk];
                let dxt = sc.ginv.congruence(&dir.dx[blk]);
                let dzt = sc.g.congruence_t(&dir.dz[blk]);
                ap = ap.min(max_step(&sc.s, &dxt));
                ad = ad.min(max_step(&sc.s, &dzt));
                dxt_all.push(dxt);
                dzt_all.push(dzt);
            }
            (ap, ad, dxt_all, dzt_all)
        };

        // Predictor: ΔX + WΔZW = −X.
        let pred = solve_dir(x.iter().map(|xb| xb.scaled(-1.0)).collect());
        let (ap_max, ad_max, dxt, dzt) = steps(&pred);
        let ap = ap_max.min(1.0);
        let ad = ad_max.min(1.0);
        let mut mu_aff = 0.0;
        for blk in 0..nblocks {
            let mut xa = x[blk].clone();
            xa.axpy(ap, &pred.dx[blk]);
            let mut za = z[blk].clone();
            za.axpy(ad, &pred.dz[blk]);
            mu_aff += xa.dot(&za);
        }
        mu_aff /= total_dim as f64;
        let expon = (3.0 * ap.min(ad) * ap.min(ad)).max(1.0);
        let sigma = if mu > 0.0 { math::powf((mu_aff / mu).max(0.0), expon).min(1.0) } else { 0.0 };

        // Corrector.
        let rc: Vec<DMat> = (0..nblocks)
            .map(|blk| {
                let sc = &scal[blk];
                let n = p.dims[blk];
                let mut prod = dxt[blk].matmul(&dzt[blk]);
                let t = prod.transpose();
                prod.axpy(1.0, &t);
                let mut r = prod.scaled(-0.5);
                for i in 0..n {
                    r.add_at(i, i, sigma * mu - sc.s[i] * sc.s[i]);
                }
                let mut u = DMat::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        u.set(i, j, 2.0 * r.get(i, j) / (sc.s[i] + sc.s[j]));
                    }
                }
                sc.g.congruence(&u)
            })
            .collect();
        let dir = solve_dir(rc);
        let (ap_max, ad_max, _, _) = steps(&dir);
        let ap = (gamma * ap_max).min(1.0);
        let ad = (gamma * ad_max).min(1.0);
        if !(ap.is_finite() && ad.is_finite()) {
            break;
        }

        for blk in 0..nblocks {
            x[blk].axpy(ap, &dir.dx[blk]);
            x[blk].symmetrize();
            z[blk].axpy(ad, &dir.dz[blk]);
            z[blk].symmetrize();
        }
        for (yk, dyk) in y.iter_mut().zip(&dir.dy) {
            *yk += ad * dyk;
        }
        gamma = 0.9 + 0.09 * ap.min(ad);

        if ap.max(ad) < 1e-8 {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
    }

    if let Some(out) = last {
        return out;
    }
    // No iterate met the tolerances: report the final state.
    let ax = p.a_op(&x);
    let rp: Vec<f64> = p.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let aty = p.at_op(&y);
    let rd: Vec<DMat> = (0..nblocks).map(|blk| p.c[blk].sub(&z[blk]).sub(&aty[blk])).collect();
    IpmOutput {
        status: if done >= settings.max_iterations { SdpStatus::MaxIterations } else { SdpStatus::Stalled },
        pobj: block_dot(&p.c, &x),
        dobj: p.b.iter().zip(&y).map(|(b, y)| b * y).sum(),
        pinf: norm2(&rp) / (1.0 + b_norm),
        dinf: blocks_norm(&rd) / (1.0 + c_norm),
        x,
        z,
        y,
        iterations: done,
    }
}
