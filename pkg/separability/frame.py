"""无迹算符子空间的正交坐标系"""
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from qstate.hermitian import Dims, DimensionError, HermitianOp, as_op
from qstate.states import ProductState


@dataclass(frozen=True, eq=False)
class Frame:
    """
    行向量为基系数空间中的正交向量（均与单位算符正交）

    full=True 时即全部无迹方向（系数下标 1..n−1），坐标直接切片得到。
    """
    dims: Dims
    rows: Optional[np.ndarray] = None

    @classmethod
    def full(cls, dims: Dims) -> "Frame":
        return cls(dims, None)

    @classmethod
    def from_rows(cls, dims: Dims, rows: np.ndarray) -> "Frame":
        rows = np.asarray(rows, dtype=float).reshape(-1, dims.n)
        if np.max(np.abs(rows @ rows.T - np.eye(len(rows))), initial=0.0) > 1e-9:
            raise ValueError("坐标系的行向量必须正交归一")
        if np.max(np.abs(rows[:, 0]), initial=0.0) > 1e-9:
            raise ValueError("坐标系必须与单位算符正交")
        rows = rows.copy()
        rows.setflags(write=False)
        return cls(dims, rows)

    @property
    def is_full(self) -> bool:
        return self.rows is None

    @cached_property
    def size(self) -> int:
        return self.dims.n - 1 if self.is_full else len(self.rows)

    def coords_of_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != self.dims.n:
            raise DimensionError(f"系数长度应为 {self.dims.n}")
        return coeffs[..., 1:].copy() if self.is_full else coeffs @ self.rows.T

    def coords(self, X) -> np.ndarray:
        """算符在坐标系上的投影坐标"""
        return self.coords_of_coeffs(as_op(X).coeffs)

    def product_coords(self, state: ProductState) -> np.ndarray:
        return self.coords_of_coeffs(state.coeffs)

    def coeffs_of(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.size,):
            raise DimensionError(f"坐标长度应为 {self.size}，收到 {x.shape}")
        if self.is_full:
            return np.concatenate([[0.0], x])
        return x @ self.rows

    def operator(self, x: np.ndarray) -> HermitianOp:
        """坐标 → 无迹算符"""
        return HermitianOp.from_coeffs(self.dims, self.coeffs_of(x))
