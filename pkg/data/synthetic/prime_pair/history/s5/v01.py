s = input().split(",")
a, b = s[0], s[1]
x = int(a[::-1])
y = int(b[::-1])
def isp(k):
    return k > 1 and all(k % d for d in range(2, k))
if isp(x) and isp(y):
    print(x + y)
elif isp(x) or isp(y):
    print(int(a) + int(b))
else:
    print(int(a) * int(b))
