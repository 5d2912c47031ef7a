"""razorlab: a desk-scale workbench for program-size complexity.

A prefix-free binary-lambda-calculus reference machine, exhaustive vote
censuses over program space, shortest-known-program search, fair-coin
sampling of the universal distribution, prediction odds, and a
model-complexity ledger.
"""

from .bits import decode_pair, encode_pair
from .census import (MonteCarloEstimate, PaddedProgram, VoteCensus,
                     build_padded, enumerate_codes, monte_carlo_m,
                     vote_census)
from .complexity import (ChainRuleReport, ComplexityEstimate, JointReport,
                         best_witness, chain_rule_gap, joint_bounds,
                         k_prime, neutrality_check)
from .ledger import (Definition, ModelManifest, Ranking, Registry,
                     constant_cost, model_complexity, rank, to_nats)
from .machine import Gas, RunOutcome, Status, reduce, run, run_demand
from .predictor import (DemocraticOdds, OddsReport, RegularizedLoss,
                        StochasticEval, democratic_odds, odds,
                        probability_vector, regularized_loss,
                        stochastic_eval)
from .terms import (App, Lam, Var, bits_to_list, decode_term, encode_term,
                    list_to_bits, parse_term, render_term)

__version__ = "0.1.0"
