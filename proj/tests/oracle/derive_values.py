"""Arbitrary-precision reference values frozen into the C++ tests (run with mpmath)."""
from mpmath import mp, mpf, sqrt, log, acos, pi, cos, binomial, ceil, e
mp.dps = 50
print("Lambda circle", 2*sqrt(2))
print("rad circle n=1600", 2*sqrt(2)/40)
print("emp rad mixed", 2*sqrt(2)/4)
print("margin bound", mpf('0.4') + sqrt(log(100)/200))
print("a posteriori", mpf('0.4') + 3*sqrt(log(120)/200))
M=144*log(6*mpf(10)**11)
print("fast rate", 4*(M+log(80))/mpf(10)**10)
print("vc", 2*sqrt(6*log(e*1000/3)/1000) + sqrt(log(20)/2000))
print("convex delta 1000,10,.03", sum(binomial(1000,j)*mpf('0.03')**j*(1-mpf('0.03'))**(1000-j) for j in range(10)))
Nm=(4+sqrt(log(1/sqrt(mpf('0.001')))))**2/mpf('0.03')**2
print("N margin", Nm, ceil(Nm))
Nc=(2*573+2*log(1000))/mpf('0.03'); print("N cvx", Nc, ceil(Nc))
print("crossover rhs", Nm*mpf('0.03')/2)
print("gamma", 2*2*sqrt(2)/(mpf('0.5')*40 - sqrt(log(1/sqrt(mpf('0.1'))))))
print("tangent vertex violation", acos(cos(35*pi/180))/pi)
print("vertex norm margin", mpf('0.7')/cos(pi/4))
# fast rate vs margin bound at N=1e3, 1e10, delta=0.05, M1=1 (C=1, so (2/gamma) S/sqrt N = 2/sqrt N)
for N in [mpf(10)**3, mpf(10)**10]:
    t5 = 4*(144*log(60*N)+log(4/mpf('0.05')))/N
    t1 = 2/sqrt(N) + sqrt(log(1/mpf('0.05'))/(2*N))
    print("N",N,"fast rate",t5,"margin bound",t1)
# Rademacher for {+c,-c}: E|sum sigma|*c/N
from itertools import product
for N in [4,8,12]:
    s=sum(abs(sum(p)) for p in product([-1,1],repeat=N))/mpf(2)**N
    print("E|walk| N",N,s, s/N)
