"""Generate the first 1000 nontrivial zeta zero ordinates and related
high-precision constants using mpmath. Run offline once; outputs are
committed under data/."""
import mpmath as mp

mp.mp.dps = 30

with open('/root/crate/data/zeros1000.txt', 'w') as f:
    for n in range(1, 1001):
        z = mp.zetazero(n)
        f.write(mp.nstr(z.imag, 11, strip_zeros=False) + '\n')

# high-precision constants for the counting-distribution boundary value
zp = mp.zeta(-1, derivative=1)
with open('/root/crate/data/constants.json', 'w') as f:
    f.write('{\n')
    f.write('  "zeta_prime_minus_one": %s,\n' % mp.nstr(zp, 17))
    f.write('  "euler_gamma": %s,\n' % mp.nstr(mp.euler, 17))
    f.write('  "omega_at_one": %s\n' % mp.nstr(mp.mpf(1)/2 + mp.euler/2 + mp.log(4*mp.pi)/2 - zp/mp.zeta(-1), 17))
    f.write('}\n')
print("done")
