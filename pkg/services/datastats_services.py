import csv
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import rel_entr

from modals.client_dataset_modal import ClientDataset, Dataset
from modals.label_distribution_modal import LabelDistribution
from schemas.partition_schema import PartitionSpec
from seedings.seed import PARTITION_STREAM, SPLIT_STREAM, SYNTH_STREAM, derive_rng
from utils.errors import InputValidationError
from utils.message import (
    BALANCED_CLASS_SHORT,
    BALANCED_K_TOO_LARGE,
    BALANCED_NOT_ENOUGH_SLOTS,
    BALANCED_UNEVEN,
    CSV_BAD_ROW,
    CSV_NO_ROWS,
    DATASET_EMPTY,
    JOINT_OF_EMPTY,
    KL_OF_EMPTY,
    LABEL_OUT_OF_RANGE,
    NUM_CLASSES_MISMATCH,
    NUM_CLASSES_MUST_BE_POSITIVE,
    TEST_FRACTION_RANGE,
)

logger = logging.getLogger(__name__)


def empirical_distribution(labels, num_classes: int) -> LabelDistribution:
    """
    Build the empirical label distribution of a label vector.

    Args:
        labels: Class indices.
        num_classes (int): Size of the label space.

    Returns:
        LabelDistribution: probs[c] = share of class c, count = number of labels.
            An empty label vector gives the empty distribution.

    Raises:
        InputValidationError: If a label lies outside [0, num_classes).
    """
    if num_classes <= 0:
        raise InputValidationError(NUM_CLASSES_MUST_BE_POSITIVE)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.size == 0:
        return LabelDistribution.empty(num_classes)

    # Reject out-of-range indices before counting
    out_of_range = labels[(labels < 0) | (labels >= num_classes)]
    if out_of_range.size:
        raise InputValidationError(
            LABEL_OUT_OF_RANGE.format(label=int(out_of_range[0]), num_classes=num_classes)
        )

    counts = np.bincount(labels, minlength=num_classes).astype(np.float64)
    return LabelDistribution(probs=counts / labels.size, count=int(labels.size))


def joint_distribution(members: Sequence[LabelDistribution]) -> LabelDistribution:
    """
    Joint label distribution of a group of clients.

    p(y_z) = sum_m (|y_m| / |y_z|) p(y_m), with |y_z| the total count.

    Args:
        members (Sequence[LabelDistribution]): Member distributions sharing num_classes.

    Returns:
        LabelDistribution: The count-weighted mixture.

    Raises:
        InputValidationError: On mismatched num_classes or when every member is empty.
    """
    members = list(members)
    if not members:
        raise InputValidationError(JOINT_OF_EMPTY)
    num_classes = members[0].num_classes
    for member in members[1:]:
        if member.num_classes != num_classes:
            raise InputValidationError(
                NUM_CLASSES_MISMATCH.format(left=num_classes, right=member.num_classes)
            )

    total = sum(member.count for member in members)
    if total == 0:
        raise InputValidationError(JOINT_OF_EMPTY)

    mass = np.zeros(num_classes)
    for member in members:
        mass += member.mass
    return LabelDistribution(probs=mass / total, count=total)


def kl_divergence(p: LabelDistribution, q: LabelDistribution) -> float:
    """
    KL(p || q) in nats.

    Uses 0 * ln(0 / q) = 0; a class with p_c > 0 and q_c = 0 makes the result infinite.

    Args:
        p (LabelDistribution): Subset distribution.
        q (LabelDistribution): Reference distribution.

    Returns:
        float: Non-negative divergence, possibly math.inf.

    Raises:
        InputValidationError: On mismatched num_classes or an empty operand.
    """
    if p.num_classes != q.num_classes:
        raise InputValidationError(NUM_CLASSES_MISMATCH.format(left=p.num_classes, right=q.num_classes))
    if p.is_empty or q.is_empty:
        raise InputValidationError(KL_OF_EMPTY)
    return kl_of_probs(p.probs, q.probs)


def kl_of_probs(p: np.ndarray, q: np.ndarray) -> float:
    """KL divergence of two raw probability vectors; clamps float round-off below zero."""
    return max(float(np.sum(rel_entr(p, q))), 0.0)


def synth_blobs(
    num_classes: int, dims: int, per_class: int, spread: float, seed: int
) -> Dataset:
    """
    Gaussian blobs around distinct class centres.

    Centres are the coordinate unit vectors when dims >= num_classes, otherwise
    seeded random unit vectors. Samples are ordered class by class.

    Args:
        num_classes (int): Number of classes.
        dims (int): Feature dimension.
        per_class (int): Samples drawn per class.
        spread (float): Standard deviation of the isotropic noise (0 puts every sample on its centre).
        seed (int): Seed of the synthetic-data stream.

    Returns:
        Dataset: num_classes * per_class labelled samples.
    """
    if num_classes <= 0 or dims <= 0 or per_class <= 0:
        raise InputValidationError(DATASET_EMPTY)
    if spread < 0:
        raise InputValidationError("spread must be non-negative.")

    rng = derive_rng(seed, SYNTH_STREAM)
    if dims >= num_classes:
        centers = np.eye(num_classes, dims)
    else:
        centers = rng.normal(size=(num_classes, dims))
        centers /= np.linalg.norm(centers, axis=1, keepdims=True)

    labels = np.repeat(np.arange(num_classes), per_class)
    noise = rng.normal(0.0, spread, size=(labels.size, dims)) if spread > 0 else 0.0
    features = centers[labels] + noise
    return Dataset(features, labels, num_classes)


def train_test_split(dataset: Dataset, test_fraction: float, seed: int) -> Tuple[Dataset, Dataset]:
    """
    Stratified held-out split.

    Every class contributes round(test_fraction * class size) samples to the test set;
    both halves keep the original sample order.

    Returns:
        Tuple[Dataset, Dataset]: (train, test).
    """
    if not 0 <= test_fraction < 1:
        raise InputValidationError(TEST_FRACTION_RANGE)
    rng = derive_rng(seed, SPLIT_STREAM)
    test_mask = np.zeros(len(dataset), dtype=bool)
    for label in range(dataset.num_classes):
        members = np.flatnonzero(dataset.labels == label)
        take = int(round(members.size * test_fraction))
        if take:
            test_mask[rng.permutation(members)[:take]] = True
    return dataset.subset(np.flatnonzero(~test_mask)), dataset.subset(np.flatnonzero(test_mask))


def load_csv_dataset(path, num_classes: Optional[int] = None) -> Dataset:
    """
    Load a dataset from CSV.

    The file has a header row and one row per sample; the last column is the
    integer label and the remaining columns are real features.

    Args:
        path: CSV file location.
        num_classes (int, optional): Label-space size; max label + 1 when omitted.

    Returns:
        Dataset: The parsed samples.

    Raises:
        InputValidationError: If the file has no rows or a row cannot be parsed.
    """
    path = Path(path)
    features: List[List[float]] = []
    labels: List[int] = []
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        width = len(header) if header else 0
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width or width < 2:
                raise InputValidationError(
                    CSV_BAD_ROW.format(path=path, row=row_number, reason=f"expected {width} columns")
                )
            try:
                features.append([float(value) for value in row[:-1]])
                labels.append(int(row[-1]))
            except ValueError as exc:
                raise InputValidationError(
                    CSV_BAD_ROW.format(path=path, row=row_number, reason=exc)
                ) from exc

    if not labels:
        raise InputValidationError(CSV_NO_ROWS.format(path=path))
    if num_classes is None:
        num_classes = max(labels) + 1
    logger.info("Loaded %d samples with %d features from %s", len(labels), width - 1, path)
    return Dataset(np.array(features), np.array(labels), num_classes)


def partition(
    dataset: Dataset, spec: PartitionSpec, rng: Optional[np.random.Generator] = None
) -> List[ClientDataset]:
    """
    Split a dataset across spec.num_clients clients.

    balanced_k: every client holds samples of exactly K classes and all client sizes
    agree within one sample. dirichlet: per-class client shares drawn from Dir(alpha).
    Every input sample lands on exactly one client.

    Args:
        dataset (Dataset): Samples to distribute.
        spec (PartitionSpec): Partition parameters.
        rng (np.random.Generator, optional): Generator to use; derived from spec.seed when omitted.

    Returns:
        List[ClientDataset]: Clients with ids 0..M-1.

    Raises:
        InputValidationError: If the dataset is empty or a balanced split is infeasible.
    """
    if len(dataset) == 0:
        raise InputValidationError(DATASET_EMPTY)
    if rng is None:
        rng = derive_rng(spec.seed or 0, PARTITION_STREAM)

    if spec.mode == "balanced_k":
        assignment = _balanced_assignment(dataset, spec, rng)
    else:
        assignment = _dirichlet_assignment(dataset, spec, rng)

    clients = []
    for client_id, indices in enumerate(assignment):
        indices = np.sort(np.asarray(indices, dtype=np.int64))
        labels = dataset.labels[indices]
        clients.append(
            ClientDataset(
                client_id=client_id,
                features=dataset.features[indices],
                labels=labels,
                label_dist=empirical_distribution(labels, dataset.num_classes),
            )
        )
    logger.debug(
        "Partitioned %d samples over %d clients (%s)", len(dataset), spec.num_clients, spec.mode
    )
    return clients


def _balanced_assignment(dataset: Dataset, spec: PartitionSpec, rng: np.random.Generator) -> List[List[int]]:
    """
    Shard-style split. Classes are shuffled once; client m takes the K consecutive
    classes starting at position m*K (wrapping), and each class is divided evenly
    among the clients holding it.
    """
    num_clients, k = spec.num_clients, spec.K
    supply = np.bincount(dataset.labels, minlength=dataset.num_classes)
    present = np.flatnonzero(supply)
    if k > present.size:
        raise InputValidationError(BALANCED_K_TOO_LARGE.format(k=k, num_classes=present.size))
    if num_clients * k < present.size:
        raise InputValidationError(
            BALANCED_NOT_ENOUGH_SLOTS.format(
                clients=num_clients, k=k, slots=num_clients * k, num_classes=present.size
            )
        )

    order = rng.permutation(present)
    holders: Dict[int, List[int]] = {int(label): [] for label in order}
    for client_id in range(num_clients):
        for slot in range(k):
            holders[int(order[(client_id * k + slot) % order.size])].append(client_id)

    for label in order:
        label = int(label)
        if supply[label] < len(holders[label]):
            raise InputValidationError(
                BALANCED_CLASS_SHORT.format(
                    label=label,
                    supply=int(supply[label]),
                    holders=len(holders[label]),
                    all_supply=supply[present].tolist(),
                    demand={int(other): len(holders[int(other)]) for other in present},
                )
            )

    totals = np.zeros(num_clients, dtype=np.int64)
    assignment: List[List[int]] = [[] for _ in range(num_clients)]
    for label in order:
        label = int(label)
        owners = holders[label]
        base, remainder = divmod(int(supply[label]), len(owners))
        shares = {owner: base for owner in owners}
        # Leftover samples go to the currently smallest holders, lowest id first
        for owner in sorted(owners, key=lambda owner: (totals[owner], owner))[:remainder]:
            shares[owner] += 1

        members = rng.permutation(np.flatnonzero(dataset.labels == label))
        offset = 0
        for owner in owners:
            assignment[owner].extend(members[offset:offset + shares[owner]].tolist())
            offset += shares[owner]
            totals[owner] += shares[owner]

    if totals.max() - totals.min() > 1:
        raise InputValidationError(
            BALANCED_UNEVEN.format(
                supply=supply[present].tolist(),
                demand={int(label): len(holders[int(label)]) for label in present},
                smallest=int(totals.min()),
                largest=int(totals.max()),
            )
        )
    return assignment


def _dirichlet_assignment(dataset: Dataset, spec: PartitionSpec, rng: np.random.Generator) -> List[List[int]]:
    """
    Per-class shares from normalised Gamma(alpha, 1) draws; proportional counts are
    floored and the remaining samples go to the largest fractional parts.
    """
    num_clients = spec.num_clients
    draws = rng.gamma(spec.alpha, 1.0, size=(dataset.num_classes, num_clients))
    assignment: List[List[int]] = [[] for _ in range(num_clients)]
    for label in range(dataset.num_classes):
        members = rng.permutation(np.flatnonzero(dataset.labels == label))
        if members.size == 0:
            continue
        row = draws[label]
        total = row.sum()
        # Tiny alpha can underflow every draw to zero
        shares = row / total if total > 0 else np.full(num_clients, 1.0 / num_clients)

        exact = shares * members.size
        counts = np.floor(exact).astype(np.int64)
        leftover = members.size - int(counts.sum())
        if leftover > 0:
            counts[np.argsort(-(exact - counts), kind="stable")[:leftover]] += 1

        offset = 0
        for client_id, count in enumerate(counts):
            assignment[client_id].extend(members[offset:offset + count].tolist())
            offset += count
    return assignment


def partition_stats(clients: Sequence[ClientDataset], global_dist: LabelDistribution) -> List[dict]:
    """
    Per-client label histograms and divergence to the global distribution.

    Args:
        clients (Sequence[ClientDataset]): Partitioned clients.
        global_dist (LabelDistribution): Distribution of the whole training set.

    Returns:
        List[dict]: One row per client with client_id, count, histogram and kl_to_global
            (nan for clients without samples).
    """
    rows = []
    for client in clients:
        histogram = np.bincount(client.labels, minlength=client.num_classes)
        kl = float("nan") if client.label_dist.is_empty else kl_divergence(client.label_dist, global_dist)
        rows.append(
            {
                "client_id": client.client_id,
                "count": client.size,
                "histogram": [int(value) for value in histogram],
                "kl_to_global": kl,
            }
        )
    return rows
