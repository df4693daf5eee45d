from os import makedirs
from os.path import exists

import polars as pl

from qrainbow import buckets as bkt
from qrainbow import grover, rainbow
from qrainbow.config import parse_p_grid
from qrainbow.dictgen import load_dictionary
from qrainbow.globalvars import *


############################################# EXPERIMENT PREP #############################################
if not exists(DATA_DIR):
    makedirs(DATA_DIR)

dictionary = load_dictionary(DEMO_DICT_FILEPATH)
print(f"Loaded demo dictionary with N = {dictionary.size}")

############################################ RAINBOW TABLE ################################################
# Generate the demo table once, then reuse it
params = rainbow.TableParams(dictionary, DEFAULT_T, DEFAULT_M, DEFAULT_K, DEFAULT_KAPPA, DEFAULT_HASH, DEFAULT_SEED)
if not exists(TABLE_FILEPATH):
    print("Generating rainbow table...")
    table = rainbow.generate_table(params, verbose=True)
    rainbow.save_table(table, TABLE_FILEPATH)
else:
    table = rainbow.load_table(TABLE_FILEPATH, dictionary)
bmap = bkt.load_or_build(table, TABLE_FILEPATH + ".bkt")
print(f"Table: m = {params.m}, t = {params.t}, coverage = {rainbow.coverage(table):.4f}")

# Crack the middle column of the first few chains with both engines
for row in table.rows[:5]:
    plaintext = rainbow.chain_columns(row.start_index, params)[params.t // 2]
    target = params.hash(plaintext)
    results = {name: rainbow.search(target, table, bmap, rainbow.get_engine(name)) for name in ENGINES}
    report = ", ".join(f"{name}: {out.result} ({out.hash_evals} hashes)" for name, out in results.items())
    print(f"{plaintext} -> {report}")

######################################### GROVER EXPERIMENTS ##############################################
### Depolarizing sweep for the noise comparison
print(f"Running noise sweep for tau = {NOISE_TAU}...")
noise_rows = grover.noise_sweep(grover.TargetSpec(NOISE_QUBITS, NOISE_TAU), parse_p_grid(NOISE_P_GRID))
pl.DataFrame(noise_rows).write_csv(NOISE_CSV_FILEPATH, float_precision=CSV_FLOAT_PRECISION)

### Noiseless success probabilities across register sizes
print(f"Running success sweep for tau in {SUCCESS_TAUS}...")
success_rows = grover.success_sweep(SUCCESS_TAUS)
success = pl.DataFrame(success_rows)
success.write_csv(SUCCESS_CSV_FILEPATH, float_precision=CSV_FLOAT_PRECISION)

print(success.pivot(on="variant", index=["n", "tau"], values="success_probability"))
for n in SUCCESS_QUBITS:
    spec = grover.TargetSpec(n, "0" * n)
    counts = {name: grover.gate_count(build(spec)) for name, build in grover.VARIANTS.items()}
    print(f"n = {n}: gate counts {counts}")
