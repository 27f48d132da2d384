import logging

logging.basicConfig(level=logging.DEBUG)

from trajlab import (
    EvalConfig, Predictor, ProfileTarget, SeededRng, gen_synsdd, profile, run_eval)

rng = SeededRng(0)
dataset = gen_synsdd(ProfileTarget.default(), 200, rng)
print(profile(dataset).to_dict())
print(run_eval(dataset, Predictor(), EvalConfig(k=1)).to_dict())
