"""OT 流形上同调计算器异常类
"""

from typing import List, Optional


class OTCohomologyError(Exception):
    """计算器基础异常"""



class SpecError(OTCohomologyError):
    """输入规格错误（CLI 退出码 2）"""



class ParseError(SpecError):
    """规格文件解析失败异常"""



class MalformedSpec(SpecError):
    """字段缺失或格式不合法"""



class WrongSignature(SpecError):
    """域的签名不满足 s >= 1 且 t >= 1"""



class WrongRank(SpecError):
    """单位元个数与 s 不一致"""



class NotALattice(SpecError):
    """p(l(U)) 不是 R^s 中的格"""



class NotUnimodular(SpecError):
    """B 的行不满足 1 + sum_k b_ik = 0"""



class NotAUnit(SpecError):
    """元素不是单位（|N(a)| != 1）"""



class NotTotallyPositive(SpecError):
    """单位在某个实嵌入下不为正"""



class NonIntegralElement(SpecError):
    """幂基坐标不是整数"""



class NotInvertible(SpecError):
    """元素与 f 不互素（f 可约的运行时证据）"""



class ReduciblePolynomial(SpecError):
    """定义多项式不满足首一、无平方因子或不可约"""



class IndexOutOfRange(SpecError):
    """多重指标越界"""



class InconsistentRelation(SpecError):
    """声明的关系不是泛函恒等式"""



class BackendUnavailable(SpecError):
    """所请求的特征比较后端不可用"""



class NumericalError(OTCohomologyError):
    """数值计算失败"""



class NonSeparableRoots(NumericalError):
    """给定精度下根的误差圆盘无法分离"""



class PrecisionExhausted(NumericalError):
    """误差半径溢出"""



class AmbiguousCharacters(OTCohomologyError):
    """数值后端无法判定两个特征是否相等（CLI 退出码 3）"""

    def __init__(self, message: str, pairs: Optional[List[str]] = None, suggested_precision: Optional[int] = None):
        super().__init__(message)
        self.pairs: List[str] = list(pairs or [])
        self.suggested_precision = suggested_precision


class VerificationError(OTCohomologyError):
    """不变量校验失败（CLI 退出码 4）"""



class MissingInverseClass(VerificationError):
    """找不到逆特征所在的类（分类实现错误）"""
