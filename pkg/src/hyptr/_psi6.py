"""Signs of the weight-6 theta polynomial: psi6 = 1/4 sum sign (theta_a theta_b theta_c)^4.

The sum runs over the 60 syzygous triples of even characteristics (triples
whose sum is again even).  The signs give the minimal-norm weight-6
Sp4(Z) invariant with value 1 at the cusp; tests/test_theta.py re-derives
them from the invariance conditions.
"""

PSI6 = {
    ('0000', '0001', '0010'): +1,
    ('0000', '0001', '0011'): +1,
    ('0000', '0001', '1000'): -1,
    ('0000', '0001', '1001'): -1,
    ('0000', '0010', '0011'): +1,
    ('0000', '0010', '0100'): -1,
    ('0000', '0010', '0110'): -1,
    ('0000', '0011', '1100'): -1,
    ('0000', '0011', '1111'): -1,
    ('0000', '0100', '0110'): -1,
    ('0000', '0100', '1000'): +1,
    ('0000', '0100', '1100'): +1,
    ('0000', '0110', '1001'): +1,
    ('0000', '0110', '1111'): +1,
    ('0000', '1000', '1001'): -1,
    ('0000', '1000', '1100'): +1,
    ('0000', '1001', '1111'): +1,
    ('0000', '1100', '1111'): -1,
    ('0001', '0010', '0011'): +1,
    ('0001', '0010', '1100'): +1,
    ('0001', '0010', '1111'): +1,
    ('0001', '0011', '0100'): +1,
    ('0001', '0011', '0110'): +1,
    ('0001', '0100', '0110'): -1,
    ('0001', '0100', '1001'): -1,
    ('0001', '0100', '1100'): +1,
    ('0001', '0110', '1000'): -1,
    ('0001', '0110', '1111'): +1,
    ('0001', '1000', '1001'): -1,
    ('0001', '1000', '1111'): -1,
    ('0001', '1001', '1100'): -1,
    ('0001', '1100', '1111'): -1,
    ('0010', '0011', '1000'): +1,
    ('0010', '0011', '1001'): +1,
    ('0010', '0100', '0110'): -1,
    ('0010', '0100', '1001'): -1,
    ('0010', '0100', '1111'): -1,
    ('0010', '0110', '1000'): -1,
    ('0010', '0110', '1100'): -1,
    ('0010', '1000', '1001'): -1,
    ('0010', '1000', '1100'): +1,
    ('0010', '1001', '1111'): +1,
    ('0010', '1100', '1111'): -1,
    ('0011', '0100', '0110'): -1,
    ('0011', '0100', '1000'): +1,
    ('0011', '0100', '1111'): -1,
    ('0011', '0110', '1001'): +1,
    ('0011', '0110', '1100'): -1,
    ('0011', '1000', '1001'): -1,
    ('0011', '1000', '1111'): -1,
    ('0011', '1001', '1100'): -1,
    ('0011', '1100', '1111'): -1,
    ('0100', '1000', '1100'): +1,
    ('0100', '1000', '1111'): +1,
    ('0100', '1001', '1100'): +1,
    ('0100', '1001', '1111'): +1,
    ('0110', '1000', '1100'): +1,
    ('0110', '1000', '1111'): +1,
    ('0110', '1001', '1100'): +1,
    ('0110', '1001', '1111'): +1,
}
