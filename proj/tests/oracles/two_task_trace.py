#!/usr/bin/env python3
"""Hand-traced timeline of tests/golden/two_task.json.

Written from the model description only (default PSM constants, EWA idle
prediction, break-even sleep choice, open-loop arrivals, analytic RC
thermal solution). Prints the golden CSV consumed by test_engine.
"""
import math

T_NOM, E_NOM = 5e-9, 1e-8
CYCLES, GAP, HORIZON = 10_000, 1e-3, 3e-3
CAPACITY, CHARGE0 = 1000.0, 900.0
AMB, R, C = 25.0, 10.0, 0.01

idle_power = {"ON1": 0.40, "SL1": 0.05, "SL2": 0.02, "SL3": 0.01, "SL4": 0.005, "Off": 0.0}
# (entry delay, entry energy, exit delay, exit energy) in us / uJ
edges = {
    "Off": (50, 1500, 300, 2500), "SL1": (3, 5, 5, 8), "SL2": (5, 30, 15, 42),
    "SL3": (10, 120, 40, 175), "SL4": (20, 400, 100, 600), "ON1": (1, 0.5, 0, 0),
}

def cost(a, b):
    return ((edges[a][2] + edges[b][0]) * 1e-6, (edges[a][3] + edges[b][1]) * 1e-6)

def break_even(idle, sleep):
    d1, e1 = cost(idle, sleep)
    d2, e2 = cost(sleep, idle)
    t_tr, e_tr = d1 + d2, e1 + e2
    pi, ps = idle_power[idle], idle_power[sleep]
    return max(t_tr, (e_tr - ps * t_tr) / (pi - ps))

def choose(predicted):
    best, best_p = "ON1", idle_power["ON1"]
    for s in ["SL1", "SL2", "SL3", "SL4", "Off"]:
        if break_even("ON1", s) <= predicted and idle_power[s] < best_p:
            best, best_p = s, idle_power[s]
    return best

# Build piecewise-constant power segments and trace points.
segments = []  # (t0, t1, power)
records = []   # (time, ip, event, state)
t, state, power = 0.0, "ON1", idle_power["ON1"]
predicted = None
idle_since = 0.0
arrival = GAP
dur = CYCLES * T_NOM
exec_power = CYCLES * E_NOM / dur

def seg(t0, t1, p):
    if t1 > t0:
        segments.append((t0, t1, p))

while arrival < HORIZON:
    seg(t, arrival, power)
    t = arrival
    observed = t - idle_since
    predicted = observed if predicted is None else 0.5 * observed + 0.5 * predicted
    records.append((t, "ip1", "arrival", state))
    if state != "ON1":  # wake
        d, e = cost(state, "ON1")
        records.append((t, "ip1", "transition_begin", "ON1"))
        seg(t, t + d, e / d)
        t += d
        state = "ON1"
        records.append((t, "ip1", "transition_end", "ON1"))
    records.append((t, "ip1", "start", "ON1"))
    seg(t, t + dur, exec_power)
    t += dur
    records.append((t, "ip1", "complete", "ON1"))
    idle_since = t
    target = choose(predicted)
    if target != state:
        d, e = cost(state, target)
        records.append((t, "ip1", "transition_begin", target))
        seg(t, t + d, e / d)
        t += d
        state = target
        records.append((t, "ip1", "transition_end", state))
    power = idle_power[state]
    arrival = arrival + dur + GAP
seg(t, HORIZON, power)
records.append((HORIZON, "*", "end", "-"))

def env_at(time):
    energy, temp = 0.0, AMB
    for t0, t1, p in segments:
        if t0 >= time:
            break
        dt = min(t1, time) - t0
        energy += p * dt
        target = AMB + p * R
        temp = target + (temp - target) * math.exp(-dt / (R * C))
    return energy, temp

print("time_s,ip,event,state,battery_J,temp_C,cum_energy_J")
for time, ip, ev, st in records:
    e, temp = env_at(time)
    print(f"{time!r},{ip},{ev},{st},{CHARGE0 - e!r},{temp!r},{e!r}")
