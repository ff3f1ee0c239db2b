//! Real-coded genetic algorithm over a bounded box.
//!
//! Each generation: evaluate, keep the elite unchanged, then fill the rest of
//! the population with children of size-2 tournament winners under per-gene
//! uniform crossover and clipped Gaussian mutation. Fitness is the negated
//! objective, so the GA minimizes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    /// Per-gene probability of swapping between the two parents.
    pub crossover_rate: f64,
    /// Per-gene probability of a Gaussian perturbation.
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of the gene's range.
    pub mutation_sigma_fraction: f64,
    pub elitism_count: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 20,
            generations: 25,
            crossover_rate: 0.1,
            mutation_rate: 0.1,
            mutation_sigma_fraction: 0.1,
            elitism_count: 1,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 || self.generations == 0 {
            return Err(Error::invalid("population size and generations must be positive"));
        }
        if self.elitism_count >= self.population_size {
            return Err(Error::invalid("elitism count must be smaller than the population"));
        }
        for (name, rate) in [("crossover", self.crossover_rate), ("mutation", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::invalid(format!("{name} rate {rate} outside [0, 1]")));
            }
        }
        if !(self.mutation_sigma_fraction > 0.0) {
            return Err(Error::invalid("mutation sigma fraction must be positive"));
        }
        Ok(())
    }
}

/// Candidate solution: one real gene per optimized variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub genes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub best_genes: Vec<f64>,
    pub best_value: f64,
    /// Best-ever objective after the initial population (index 0) and after
    /// each generation.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

struct Evaluated {
    chromosome: Chromosome,
    value: f64,
}

/// Minimize `objective` over the box `bounds`. Non-finite objective values
/// rank as the worst possible fitness.
pub fn minimize<F>(objective: F, bounds: &[(f64, f64)], config: &GaConfig) -> Result<GaOutcome>
where
    F: Fn(&[f64]) -> f64,
{
    config.validate()?;
    if bounds.is_empty() {
        return Err(Error::invalid("no variables to optimize"));
    }
    if let Some((g, (lo, hi))) = bounds
        .iter()
        .enumerate()
        .find(|(_, (lo, hi))| !(lo <= hi) || !lo.is_finite() || !hi.is_finite())
    {
        return Err(Error::invalid(format!("gene {g} has invalid bounds ({lo}, {hi})")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut evaluations = 0;
    let mut evaluate = |chromosome: Chromosome| {
        evaluations += 1;
        let v = objective(&chromosome.genes);
        Evaluated {
            chromosome,
            value: if v.is_finite() { v } else { f64::INFINITY },
        }
    };

    let mut population: Vec<Evaluated> = (0..config.population_size)
        .map(|_| {
            let genes = bounds.iter().map(|&(lo, hi)| sample(&mut rng, lo, hi)).collect();
            evaluate(Chromosome { genes })
        })
        .collect();

    let mut best = best_of(&population);
    let mut best_genes = population[best].chromosome.genes.clone();
    let mut best_value = population[best].value;
    let mut history = Vec::with_capacity(config.generations + 1);
    history.push(best_value);

    for _ in 0..config.generations {
        let mut ranked: Vec<usize> = (0..population.len()).collect();
        ranked.sort_by(|&a, &b| population[a].value.total_cmp(&population[b].value));

        let mut next: Vec<Evaluated> = ranked[..config.elitism_count]
            .iter()
            .map(|&i| Evaluated {
                chromosome: population[i].chromosome.clone(),
                value: population[i].value,
            })
            .collect();
        while next.len() < config.population_size {
            let mut a = tournament(&population, &mut rng).chromosome.clone();
            let mut b = tournament(&population, &mut rng).chromosome.clone();
            for g in 0..bounds.len() {
                if rng.random::<f64>() < config.crossover_rate {
                    std::mem::swap(&mut a.genes[g], &mut b.genes[g]);
                }
            }
            for child in [a, b] {
                if next.len() == config.population_size {
                    break;
                }
                let child = mutate(child, bounds, config, &mut rng);
                next.push(evaluate(child));
            }
        }
        population = next;

        best = best_of(&population);
        if population[best].value < best_value {
            best_value = population[best].value;
            best_genes = population[best].chromosome.genes.clone();
        }
        history.push(best_value);
    }

    Ok(GaOutcome {
        best_genes,
        best_value,
        history,
        evaluations,
    })
}

fn sample(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

fn best_of(population: &[Evaluated]) -> usize {
    let mut best = 0;
    for (i, e) in population.iter().enumerate() {
        if e.value < population[best].value {
            best = i;
        }
    }
    best
}

fn tournament<'a>(population: &'a [Evaluated], rng: &mut ChaCha8Rng) -> &'a Evaluated {
    let a = &population[rng.random_range(0..population.len())];
    let b = &population[rng.random_range(0..population.len())];
    if b.value < a.value {
        b
    } else {
        a
    }
}

fn mutate(mut c: Chromosome, bounds: &[(f64, f64)], config: &GaConfig, rng: &mut ChaCha8Rng) -> Chromosome {
    for (gene, &(lo, hi)) in c.genes.iter_mut().zip(bounds) {
        if rng.random::<f64>() < config.mutation_rate {
            let noise: f64 = rng.sample(StandardNormal);
            *gene = (*gene + noise * config.mutation_sigma_fraction * (hi - lo)).clamp(lo, hi);
        }
    }
    c
}
