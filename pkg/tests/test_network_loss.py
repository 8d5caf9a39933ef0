"""
Tests for the multi-task network and the uncertainty-weighted loss.
"""

import math

import numpy as np
import pytest
import torch

from facadelens.exceptions import LossInputError, ShapeMismatchError
from facadelens.models.labels import (
    BuildingStructure,
    FireproofClass,
    PropertyType,
)
from facadelens.models.network import (
    MultiTaskModel,
    UncertaintyWeights,
    combined_loss,
    optimal_sigma,
)
from facadelens.models.training import TrainConfig
from facadelens.services.rules import fireproof_class
from facadelens.services.training import build_model, decode_prediction


def _sigma_to_log_var(sigma: float) -> float:
    return 2.0 * math.log(sigma)


class TestCombinedLoss:
    """Test the uncertainty-weighted loss."""

    def test_single_task_unit_sigma(self):
        """L=1, sigma=1 gives 0.5."""
        assert combined_loss([1.0], [0.0]).item() == pytest.approx(0.5)

    def test_single_task_sigma_two(self):
        """L=4, sigma=2 gives 4/8 + log 2."""
        value = combined_loss([4.0], [_sigma_to_log_var(2.0)]).item()
        assert value == pytest.approx(0.5 + math.log(2.0), abs=1e-12)
        assert value == pytest.approx(1.1931, abs=1e-4)

    def test_zero_losses(self):
        """Three zero losses at unit sigma give 0."""
        assert combined_loss([0.0, 0.0, 0.0], [0.0, 0.0, 0.0]).item() == 0.0

    @pytest.mark.parametrize(
        "losses, log_vars",
        [
            ([float("nan")], [0.0]),
            ([1.0], [float("inf")]),
            ([-1.0], [0.0]),
            ([1.0, 2.0], [0.0]),
        ],
    )
    def test_invalid_inputs(self, losses, log_vars):
        """Non-finite, negative or mismatched inputs are errors."""
        with pytest.raises(LossInputError):
            combined_loss(losses, log_vars)

    def test_gradient_matches_central_differences(self):
        """d/ds_i agrees with central differences on 100 random draws."""
        rng = np.random.default_rng(0)
        step = 1e-4
        for _ in range(100):
            losses = torch.tensor(rng.uniform(0.01, 10.0, size=3), dtype=torch.float64)
            log_vars = torch.tensor(
                rng.uniform(-2.0, 2.0, size=3), dtype=torch.float64, requires_grad=True
            )
            combined_loss(losses, log_vars).backward()
            analytic = log_vars.grad.numpy()

            base = log_vars.detach().numpy()
            for i in range(3):
                up, down = base.copy(), base.copy()
                up[i] += step
                down[i] -= step
                numeric = (
                    combined_loss(losses, torch.from_numpy(up)).item()
                    - combined_loss(losses, torch.from_numpy(down)).item()
                ) / (2 * step)
                assert numeric == pytest.approx(analytic[i], rel=1e-4, abs=1e-8)

    def test_gradient_flows_to_losses(self):
        """The loss is differentiable in the task losses too."""
        losses = torch.tensor([2.0], dtype=torch.float64, requires_grad=True)
        combined_loss(losses, torch.tensor([0.0], dtype=torch.float64)).backward()
        assert losses.grad.item() == pytest.approx(0.5)

    @pytest.mark.parametrize("loss", [0.25, 1.0, 4.0, 9.0])
    def test_grid_minimum_at_sqrt_loss(self, loss):
        """Over a sigma grid the minimum sits at sqrt(L)."""
        sigmas = torch.arange(1, 10001, dtype=torch.float64) * 1e-3
        values = loss / (2 * sigmas**2) + torch.log(sigmas)
        via_combined = torch.stack(
            [combined_loss([loss], [_sigma_to_log_var(s)]) for s in (0.5, 1.0, 2.0)]
        )

        best = sigmas[int(values.argmin())].item()
        assert best == pytest.approx(math.sqrt(loss), abs=1e-3)
        for sigma, value in zip((0.5, 1.0, 2.0), via_combined, strict=True):
            expected = loss / (2 * sigma**2) + math.log(sigma)
            assert value.item() == pytest.approx(expected, abs=1e-12)


class TestOptimalSigma:
    """Test the analytic minimizer."""

    @pytest.mark.parametrize("loss, sigma", [(4.0, 2.0), (1.0, 1.0), (0.25, 0.5)])
    def test_values(self, loss, sigma):
        """sigma* = sqrt(L)."""
        assert optimal_sigma(loss) == pytest.approx(sigma)

    @pytest.mark.parametrize("loss", [0.0, -1.0, float("inf")])
    def test_invalid(self, loss):
        """No minimizer for L <= 0."""
        with pytest.raises(LossInputError):
            optimal_sigma(loss)


class TestUncertaintyWeights:
    """Test the learnable log-variances."""

    def test_starts_at_unit_sigma(self):
        """Fresh weights mean sigma = 1 for every task."""
        weights = UncertaintyWeights()
        assert torch.equal(weights.sigmas, torch.ones(3))

    def test_sigmas_positive(self):
        """Any finite log-variance gives a positive sigma."""
        weights = UncertaintyWeights()
        with torch.no_grad():
            weights.log_vars.copy_(torch.tensor([-30.0, 0.0, 30.0]))
        assert bool((weights.sigmas > 0).all())


class TestForward:
    """Test the network's forward pass."""

    @pytest.fixture(scope="class")
    def model(self):
        return build_model(seed=0).eval()

    def test_probabilities_on_simplex(self, model):
        """Classification heads sum to one per row."""
        batch = torch.rand(4, 128, 128, 3, generator=torch.Generator().manual_seed(1))
        probs = model.predict_proba(batch)

        assert probs.structure_probs.shape == (4, 3)
        assert probs.ptype_probs.shape == (4, 2)
        assert torch.allclose(probs.structure_probs.sum(dim=1), torch.ones(4), atol=1e-5)
        assert torch.allclose(probs.ptype_probs.sum(dim=1), torch.ones(4), atol=1e-5)
        assert bool(torch.isfinite(probs.year).all())

    def test_duplicated_rows(self, model):
        """Identical inputs give the same outputs up to float rounding."""
        image = torch.rand(1, 128, 128, 3, generator=torch.Generator().manual_seed(2))
        outputs = model(image.repeat(2, 1, 1, 1))

        assert torch.allclose(outputs.year[0], outputs.year[1], atol=1e-6)
        assert torch.allclose(
            outputs.structure_logits[0], outputs.structure_logits[1], atol=1e-6
        )
        assert torch.allclose(outputs.ptype_logits[0], outputs.ptype_logits[1], atol=1e-6)

    def test_empty_batch(self, model):
        """N = 0 gives empty outputs."""
        outputs = model(torch.zeros(0, 128, 128, 3))
        assert outputs.year.shape == (0,)
        assert outputs.structure_logits.shape == (0, 3)
        assert outputs.ptype_logits.shape == (0, 2)

    @pytest.mark.parametrize("shape", [(2, 3, 128, 128), (2, 64, 64, 3), (128, 128, 3)])
    def test_shape_mismatch(self, model, shape):
        """Anything but N x 128 x 128 x 3 is rejected."""
        with pytest.raises(ShapeMismatchError):
            model(torch.zeros(shape))

    def test_seeded_initialization(self):
        """Equal seeds give equal weights; the global RNG is untouched."""
        torch.manual_seed(123)
        before = torch.rand(1)
        torch.manual_seed(123)
        a = build_model(5)
        b = build_model(5)
        after = torch.rand(1)

        assert torch.equal(before, after)
        for (name, p), (_, q) in zip(
            a.state_dict().items(), b.state_dict().items(), strict=True
        ):
            assert torch.equal(p, q), name

    def test_architecture(self):
        """Architecture describes the rebuildable hyperparameters."""
        model = MultiTaskModel(channels=(4, 8), image_size=32)
        assert model.architecture()["channels"] == [4, 8]
        assert model.architecture()["tasks"] == ["year", "structure", "ptype"]


class TestDecodePrediction:
    """Test turning head outputs into labels."""

    def test_steel_non_communal(self):
        """Argmax plus rules gives semi-fireproof."""
        prediction = decode_prediction(0.0, (0.1, 0.7, 0.2), (0.4, 0.6), TrainConfig())

        assert prediction.structure is BuildingStructure.STEEL_LIKE
        assert prediction.ptype is PropertyType.NON_COMMUNAL
        assert prediction.fireproof is FireproofClass.T

    @pytest.mark.parametrize("ptype_probs", [(0.9, 0.1), (0.2, 0.8)])
    def test_concrete_is_fireproof(self, ptype_probs):
        """Concrete is M whatever the property type."""
        prediction = decode_prediction(0.3, (0.9, 0.05, 0.05), ptype_probs, TrainConfig())
        assert prediction.fireproof is FireproofClass.M

    def test_year_denormalization(self):
        """0.0 is the anchor year 1970."""
        assert decode_prediction(0.0, (1, 0, 0), (1, 0), TrainConfig()).year == 1970.0
        assert decode_prediction(1.0, (1, 0, 0), (1, 0), TrainConfig()).year == 2020.0

    def test_argmax_invariant_to_logit_scale(self):
        """Scaling logits by a positive constant never changes labels."""
        rng = np.random.default_rng(3)
        config = TrainConfig()
        for _ in range(50):
            structure_logits = torch.tensor(rng.normal(size=3))
            ptype_logits = torch.tensor(rng.normal(size=2))
            scale = float(rng.uniform(0.1, 10.0))

            plain = decode_prediction(
                0.0,
                torch.softmax(structure_logits, 0).numpy(),
                torch.softmax(ptype_logits, 0).numpy(),
                config,
            )
            scaled = decode_prediction(
                0.0,
                torch.softmax(scale * structure_logits, 0).numpy(),
                torch.softmax(scale * ptype_logits, 0).numpy(),
                config,
            )
            assert plain == scaled

    def test_fireproof_consistent_with_intermediates(self):
        """The fireproof label is always the rule applied to the outputs."""
        rng = np.random.default_rng(4)
        for _ in range(50):
            prediction = decode_prediction(
                rng.normal(), rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(2)), TrainConfig()
            )
            assert prediction.fireproof is fireproof_class(
                prediction.structure, prediction.ptype
            )
