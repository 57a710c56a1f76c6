"""Smoke test for the pyviewsim extension module."""

import pyviewsim as vs

assert vs.xi(3.0, 1.0) == 0.5
assert vs.sigma([0.0, 2.0]) == 1.0

names = vs.bundled_scenarios()
assert "fig5-LV-DP" in names, names

sc = vs.Scenario.bundled("fig5-LV-DP")
sc.runs = 1
sc.horizon = 20.0
print(sc)

out = sc.run()
assert out["time"][-1] == 20.0
print("mean xi_f", out["mean_xi_f"], "mean xi_b", out["mean_xi_b"])

for row in sc.sweep():
    print("sync", row["value"], "xi_f", row["xi_f"], "xi_b", row["xi_b"])

m = vs.ModelState(2)
for _ in range(10):
    server, decision, xi = m.step_xi([0.0, 0.0])
print("model loads", m.loads, "xi", m.xi())

try:
    vs.Scenario.parse("bogus = 1\n")
except ValueError as e:
    print("rejected:", e)
else:
    raise AssertionError("bad scenario accepted")

print("ok")
