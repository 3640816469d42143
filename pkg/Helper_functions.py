#!/usr/bin/env python
""" Helper_functions.py: Generic numerical helpers shared by the contactlab modules. """

__version__ = "0.2"

import itertools
import numpy as np
import scipy.linalg as linalg
# Own modules:
from Logging import Logger


class HelperFunctions:
    """
    This class contains the linear algebra and sampling helpers that are used in multiple modules: numerical rank,
    orthonormal bases, null spaces, principal angles, finite differences and grid sweeps over boxes.

    All rank decisions are scale free: a singular value counts as zero when it is below ``rank_tol`` times a
    reference scale (by default the largest singular value).

    """

    def __init__(self, loglevel='INFO'):
        self.logger = Logger('Helper_functions.HelperFunctions', loglevel).logger

    @staticmethod
    def numerical_rank(matrix, rank_tol=1e-10, scale=None):
        """
        This function returns the number of singular values above rank_tol times the scale. A zero matrix has rank 0.

        :param matrix: 2-d array
        :param rank_tol: relative tolerance
        :param scale: (OPTIONAL) reference scale, default = largest singular value
        :return: integer rank
        """
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if matrix.size == 0:
            return 0
        sv = linalg.svdvals(matrix)
        reference = sv.max() if scale is None else scale
        if reference <= 0:
            return 0
        return int(np.sum(sv > rank_tol * reference))

    @staticmethod
    def orthonormal_basis(matrix, rank_tol=1e-10, scale=None):
        """
        This function returns an orthonormal basis (as columns) of the column span of the matrix.

        :param matrix: (d, k) array, columns are the spanning vectors
        :param rank_tol: relative tolerance for the rank decision
        :param scale: (OPTIONAL) reference scale, default = largest singular value
        :return: (d, r) array with orthonormal columns
        """
        matrix = np.asarray(matrix, dtype=float)
        dim = matrix.shape[0]
        if matrix.ndim == 1:
            matrix = matrix[:, None]
        if matrix.shape[1] == 0:
            return np.zeros((dim, 0))
        u, sv, _ = linalg.svd(matrix, full_matrices=False)
        reference = sv.max() if scale is None else scale
        if reference <= 0:
            return np.zeros((dim, 0))
        rank = int(np.sum(sv > rank_tol * reference))
        return u[:, :rank]

    @staticmethod
    def null_space(matrix, rank_tol=1e-10, scale=None):
        """
        This function returns an orthonormal basis (as columns) of the right null space of the matrix.
        A matrix without rows has the whole space as null space.

        :param matrix: (m, n) array
        :param rank_tol: relative tolerance for the rank decision
        :param scale: (OPTIONAL) reference scale, default = largest singular value
        :return: (n, n - rank) array with orthonormal columns
        """
        matrix = np.asarray(matrix, dtype=float)
        n = matrix.shape[1]
        if matrix.shape[0] == 0 or n == 0:
            return np.eye(n)
        _, sv, vt = linalg.svd(matrix, full_matrices=True)
        reference = sv.max() if scale is None else scale
        rank = 0 if reference <= 0 else int(np.sum(sv > rank_tol * reference))
        return vt[rank:].T.copy()

    @staticmethod
    def containment_sine(basis, target):
        """
        This function measures how far span(basis) is from lying inside span(target): the sine of the largest
        principal angle between each unit vector of span(basis) and span(target). Both inputs must have orthonormal
        columns. An empty basis is always contained (0), a non-empty basis is never inside an empty target (1).

        :param basis: (d, k) orthonormal columns
        :param target: (d, r) orthonormal columns
        :return: sine in [0, 1]
        """
        if basis.shape[1] == 0:
            return 0.0
        if target.shape[1] == 0:
            return 1.0
        outside = basis - target @ (target.T @ basis)
        return float(min(1.0, linalg.norm(outside, 2)))

    @staticmethod
    def subspace_distance(first, second):
        """
        This function returns the sine of the largest principal angle between two subspaces given by orthonormal
        columns. Subspaces of different dimension are at distance 1.

        :param first: (d, k) orthonormal columns
        :param second: (d, r) orthonormal columns
        :return: sine in [0, 1]
        """
        if first.shape[1] != second.shape[1]:
            return 1.0
        if first.shape[1] == 0:
            return 0.0
        angles = linalg.subspace_angles(first, second)
        return float(np.sin(np.max(angles)))

    @staticmethod
    def central_difference(func, batch, step, with_center=False):
        """
        This function estimates the jacobians of a vectorized map at a batch of points by central differences.
        The map is called once on the stacked stencils of all points.

        :param func: map from (M, d) arrays to (M, k) or (M,) arrays
        :param batch: (N, d) array
        :param step: finite difference step
        :param with_center: (OPTIONAL) also map the points themselves and return their images
        :return: (N, k, d) jacobians, or (images (N, k), jacobians) with with_center
        """
        batch = np.atleast_2d(np.asarray(batch, dtype=float))
        n_points, dim = batch.shape
        offsets = step * np.eye(dim)
        layers = [batch[:, None, :] + offsets[None], batch[:, None, :] - offsets[None]]
        if with_center:
            layers.insert(0, batch[:, None, :])
        stencil = np.concatenate(layers, axis=1)
        values = np.asarray(func(stencil.reshape(-1, dim)), dtype=float).reshape(n_points, stencil.shape[1], -1)
        first = 1 if with_center else 0
        jacobians = (values[:, first:first + dim] - values[:, first + dim:]).transpose(0, 2, 1) / (2 * step)
        if with_center:
            return values[:, 0], jacobians
        return jacobians

    @staticmethod
    def box_axes(box, resolution):
        """
        This function returns the sample axes of a box, one linspace of length resolution per side.

        :param box: list of (low, high) pairs
        :param resolution: number of samples per axis
        :return: list of 1-d arrays
        """
        return [np.linspace(low, high, resolution) for low, high in box]

    def box_chunks(self, box, resolution, max_points=250000):
        """
        This generator sweeps the full tensor grid of a box in chunks so that very fine grids (201 per axis in three
        dimensions) never have to be held in memory at once. Each chunk is an (N, d) array of points. The leading
        axes are iterated, the trailing axes are meshed.

        :param box: list of (low, high) pairs
        :param resolution: number of samples per axis
        :param max_points: (OPTIONAL) upper bound on the chunk size
        """
        axes = self.box_axes(box, resolution)
        dim = len(axes)
        # Mesh as many trailing axes as fit in one chunk:
        meshed = 0
        size = 1
        while meshed < dim and size * resolution <= max_points:
            size *= resolution
            meshed += 1
        meshed = max(meshed, 1)
        tail = np.stack(np.meshgrid(*axes[dim - meshed:], indexing='ij'), axis=-1).reshape(-1, meshed)
        for head in itertools.product(*axes[:dim - meshed]):
            chunk = np.empty((tail.shape[0], dim))
            chunk[:, :dim - meshed] = head
            chunk[:, dim - meshed:] = tail
            yield chunk

    @staticmethod
    def box_grid(box, resolution):
        """
        This function returns the full tensor grid of a box as an (N, d) array. Only use it for coarse grids.

        :param box: list of (low, high) pairs
        :param resolution: number of samples per axis
        :return: (resolution ** d, d) array
        """
        axes = [np.linspace(low, high, resolution) for low, high in box]
        return np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, len(axes))
