"""Compiled inner loops for ensemble rollouts.

The arithmetic here mirrors ``model.euler_maruyama_step`` /
``model.normalize_state`` / ``costs.state_cost`` term by term (same operation
order) so that the compiled path and the plain numpy path agree to machine
precision; a regression test cross-checks them.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def rollout_costs(x0, noise, dt, beta, gamma, delta, sigma_v, sigma_l, weights, eta):
    """Roll M uncontrolled trajectories and accumulate their costs.

    x0: (J, 4) shared start state.  noise: (n_steps, M, J, 2) standard
    normals (scaled by sigma inside).  Returns the (M,) vector of
    discretized trajectory costs: sum of state costs over the first n_steps
    states weighted by dt, plus the terminal state cost.
    """
    n_steps, n_traj, n_groups, _ = noise.shape
    sq = np.sqrt(dt)
    costs = np.zeros(n_traj)
    x = np.empty((n_traj, n_groups, 4))
    for m in range(n_traj):
        for j in range(n_groups):
            for c in range(4):
                x[m, j, c] = x0[j, c]
    force = np.empty(n_groups)
    for k in range(n_steps):
        for m in range(n_traj):
            # running cost q(x_k) * dt at the pre-step state
            q = 0.0
            lo = np.inf
            hi = -np.inf
            for j in range(n_groups):
                burden = x[m, j, 1] + x[m, j, 3]
                q += weights[j] * burden
                if burden < lo:
                    lo = burden
                if burden > hi:
                    hi = burden
            q += eta * (hi - lo)
            costs[m] += q * dt

            # forces from the pre-step state (cross-group coupling)
            for j in range(n_groups):
                acc = 0.0
                for jj in range(n_groups):
                    acc += beta[j, jj] * x[m, jj, 1]
                force[j] = acc
            for j in range(n_groups):
                s = x[m, j, 0]
                i = x[m, j, 1]
                d = x[m, j, 3]
                infection = s * force[j]
                ds = -infection
                di = infection - (gamma[j] + delta[j]) * i
                dd = delta[j] * i
                eff_v = (sigma_v[j] * noise[k, m, j, 0]) * sq
                eff_l = (sigma_l[j] * noise[k, m, j, 1]) * sq
                s_raw = (s + ds * dt) - s * eff_v
                i_raw = (i + di * dt) - i * eff_l
                d_raw = d + dd * dt

                # simplex repair: clamp S, I, D, recompute R as the slack;
                # if the slack would go negative, shrink S and I into the
                # 1 - D budget (D is never reduced, keeping mortality monotone)
                s_c = min(max(s_raw, 0.0), 1.0)
                i_c = min(max(i_raw, 0.0), 1.0)
                d_c = min(max(d_raw, 0.0), 1.0)
                r_n = 1.0 - s_c - i_c - d_c
                if r_n < 0.0:
                    scale = (1.0 - d_c) / (s_c + i_c)
                    s_c = s_c * scale
                    i_c = i_c * scale
                    r_n = 0.0
                x[m, j, 0] = s_c
                x[m, j, 1] = i_c
                x[m, j, 2] = r_n
                x[m, j, 3] = d_c
    # terminal cost q(x_K)
    for m in range(n_traj):
        q = 0.0
        lo = np.inf
        hi = -np.inf
        for j in range(n_groups):
            burden = x[m, j, 1] + x[m, j, 3]
            q += weights[j] * burden
            if burden < lo:
                lo = burden
            if burden > hi:
                hi = burden
        q += eta * (hi - lo)
        costs[m] += q
    return costs
