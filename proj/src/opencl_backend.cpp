#include "bwtune/opencl_backend.hpp"

#ifndef BWTUNE_HAVE_OPENCL

namespace bwtune {

bool opencl_available() { return false; }

std::vector<OpenCLDeviceInfo> list_opencl_devices() {
  throw std::runtime_error("built without OpenCL support");
}

struct OpenCLBackend::Impl {};

OpenCLBackend::OpenCLBackend(const DeviceSpec&) {
  throw std::runtime_error(
      "built without OpenCL support; use a sim:<profile> backend instead");
}
OpenCLBackend::~OpenCLBackend() = default;
std::string OpenCLBackend::device_name() const { return {}; }
const DeviceSpec& OpenCLBackend::device() const {
  static DeviceSpec spec;
  return spec;
}
std::unique_ptr<ProgramHandle> OpenCLBackend::compile(const KernelSource&) {
  return nullptr;
}
double OpenCLBackend::execute(ProgramHandle&, const LaunchPlan&, OperandData&) {
  return 0.0;
}
double OpenCLBackend::execute_timed(ProgramHandle&, const LaunchPlan&, OperandData&) {
  return 0.0;
}

}  // namespace bwtune

#else  // BWTUNE_HAVE_OPENCL

#define CL_TARGET_OPENCL_VERSION 120
#define CL_USE_DEPRECATED_OPENCL_1_2_APIS
#include <CL/cl.h>

#include <cstring>

namespace bwtune {

namespace {

void check(cl_int status, const char* what) {
  if (status != CL_SUCCESS) {
    throw std::runtime_error(std::string(what) + " failed with OpenCL error " +
                             std::to_string(status));
  }
}

std::string device_string(cl_device_id device, cl_device_info what) {
  size_t size = 0;
  clGetDeviceInfo(device, what, 0, nullptr, &size);
  std::string value(size, '\0');
  clGetDeviceInfo(device, what, size, value.data(), nullptr);
  while (!value.empty() && (value.back() == '\0' || value.back() == ' '))
    value.pop_back();
  return value;
}

template <typename T>
T device_scalar(cl_device_id device, cl_device_info what) {
  T value{};
  clGetDeviceInfo(device, what, sizeof value, &value, nullptr);
  return value;
}

bool device_fp64(cl_device_id device) {
  return device_string(device, CL_DEVICE_EXTENSIONS).find("cl_khr_fp64") !=
         std::string::npos;
}

DeviceClass classify(cl_device_type type) {
  if (type & CL_DEVICE_TYPE_CPU) return DeviceClass::CPU;
  if (type & CL_DEVICE_TYPE_GPU) return DeviceClass::GPU;
  return DeviceClass::Accelerator;
}

struct ClBuffer {
  cl_mem mem = nullptr;
  ~ClBuffer() {
    if (mem) clReleaseMemObject(mem);
  }
};

struct ClProgram : ProgramHandle {
  cl_program program = nullptr;
  cl_kernel kernel = nullptr;
  KernelSource source;
  ~ClProgram() override {
    if (kernel) clReleaseKernel(kernel);
    if (program) clReleaseProgram(program);
  }
};

}  // namespace

bool opencl_available() { return true; }

std::vector<OpenCLDeviceInfo> list_opencl_devices() {
  std::vector<OpenCLDeviceInfo> infos;
  cl_uint num_platforms = 0;
  if (clGetPlatformIDs(0, nullptr, &num_platforms) != CL_SUCCESS) return infos;
  std::vector<cl_platform_id> platforms(num_platforms);
  clGetPlatformIDs(num_platforms, platforms.data(), nullptr);
  for (cl_platform_id platform : platforms) {
    size_t name_size = 0;
    clGetPlatformInfo(platform, CL_PLATFORM_NAME, 0, nullptr, &name_size);
    std::string platform_name(name_size, '\0');
    clGetPlatformInfo(platform, CL_PLATFORM_NAME, name_size, platform_name.data(),
                      nullptr);
    cl_uint num_devices = 0;
    if (clGetDeviceIDs(platform, CL_DEVICE_TYPE_ALL, 0, nullptr, &num_devices) !=
        CL_SUCCESS)
      continue;
    std::vector<cl_device_id> devices(num_devices);
    clGetDeviceIDs(platform, CL_DEVICE_TYPE_ALL, num_devices, devices.data(), nullptr);
    for (cl_device_id device : devices) {
      OpenCLDeviceInfo info;
      info.platform_name = platform_name.c_str();
      info.device_name = device_string(device, CL_DEVICE_NAME);
      info.device_class = classify(device_scalar<cl_device_type>(device,
                                                                 CL_DEVICE_TYPE));
      info.max_local_size = static_cast<uint32_t>(
          device_scalar<size_t>(device, CL_DEVICE_MAX_WORK_GROUP_SIZE));
      info.local_mem_bytes =
          device_scalar<cl_ulong>(device, CL_DEVICE_LOCAL_MEM_SIZE);
      info.supports_fp64 = device_fp64(device);
      infos.push_back(std::move(info));
    }
  }
  return infos;
}

struct OpenCLBackend::Impl {
  DeviceSpec spec;
  cl_device_id device = nullptr;
  cl_context context = nullptr;
  cl_command_queue queue = nullptr;
  uint64_t local_mem_bytes = 0;

  ~Impl() {
    if (queue) clReleaseCommandQueue(queue);
    if (context) clReleaseContext(context);
  }

  double run(ClProgram& program, const LaunchPlan& plan, OperandData& data,
             bool read_outputs);
};

OpenCLBackend::OpenCLBackend(const DeviceSpec& spec) : impl_(new Impl) {
  impl_->spec = spec;

  cl_uint num_platforms = 0;
  check(clGetPlatformIDs(0, nullptr, &num_platforms), "clGetPlatformIDs");
  std::vector<cl_platform_id> platforms(num_platforms);
  clGetPlatformIDs(num_platforms, platforms.data(), nullptr);
  for (cl_platform_id platform : platforms) {
    cl_uint num_devices = 0;
    if (clGetDeviceIDs(platform, CL_DEVICE_TYPE_ALL, 0, nullptr, &num_devices) !=
        CL_SUCCESS)
      continue;
    std::vector<cl_device_id> devices(num_devices);
    clGetDeviceIDs(platform, CL_DEVICE_TYPE_ALL, num_devices, devices.data(), nullptr);
    for (cl_device_id device : devices) {
      if (device_string(device, CL_DEVICE_NAME).find(spec.name) == std::string::npos)
        continue;
      impl_->device = device;
      break;
    }
    if (impl_->device) break;
  }
  if (!impl_->device)
    throw std::runtime_error("no OpenCL device matching '" + spec.name + "'");

  impl_->spec.supports_fp64 = device_fp64(impl_->device);
  impl_->spec.max_local_size = std::min<uint32_t>(
      impl_->spec.max_local_size,
      static_cast<uint32_t>(
          device_scalar<size_t>(impl_->device, CL_DEVICE_MAX_WORK_GROUP_SIZE)));
  impl_->local_mem_bytes =
      device_scalar<cl_ulong>(impl_->device, CL_DEVICE_LOCAL_MEM_SIZE);

  cl_int status = CL_SUCCESS;
  impl_->context =
      clCreateContext(nullptr, 1, &impl_->device, nullptr, nullptr, &status);
  check(status, "clCreateContext");
  impl_->queue = clCreateCommandQueue(impl_->context, impl_->device,
                                      CL_QUEUE_PROFILING_ENABLE, &status);
  check(status, "clCreateCommandQueue");
}

OpenCLBackend::~OpenCLBackend() = default;

std::string OpenCLBackend::device_name() const { return impl_->spec.name; }
const DeviceSpec& OpenCLBackend::device() const { return impl_->spec; }

std::unique_ptr<ProgramHandle> OpenCLBackend::compile(const KernelSource& source) {
  if (source.precision == Precision::fp64 && !impl_->spec.supports_fp64)
    throw Fp64Unsupported(impl_->spec.name);

  auto handle = std::make_unique<ClProgram>();
  handle->source = source;

  const char* text = source.source_text.c_str();
  const size_t length = source.source_text.size();
  cl_int status = CL_SUCCESS;
  handle->program =
      clCreateProgramWithSource(impl_->context, 1, &text, &length, &status);
  check(status, "clCreateProgramWithSource");

  status = clBuildProgram(handle->program, 1, &impl_->device, "", nullptr, nullptr);
  if (status != CL_SUCCESS) {
    size_t log_size = 0;
    clGetProgramBuildInfo(handle->program, impl_->device, CL_PROGRAM_BUILD_LOG, 0,
                          nullptr, &log_size);
    std::string log(log_size, '\0');
    clGetProgramBuildInfo(handle->program, impl_->device, CL_PROGRAM_BUILD_LOG,
                          log_size, log.data(), nullptr);
    throw CompileError(log);
  }

  handle->kernel =
      clCreateKernel(handle->program, source.entry_point_name.c_str(), &status);
  if (status != CL_SUCCESS)
    throw CompileError("entry point '" + source.entry_point_name + "' not found");
  return handle;
}

namespace {

template <typename T>
std::vector<T> narrow(const std::vector<double>& values) {
  std::vector<T> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out[i] = static_cast<T>(values[i]);
  return out;
}

template <typename T>
cl_mem make_buffer(cl_context context, const std::vector<double>& host,
                   cl_mem_flags flags) {
  cl_int status = CL_SUCCESS;
  std::vector<T> staged = narrow<T>(host);
  cl_mem mem = clCreateBuffer(context, flags | CL_MEM_COPY_HOST_PTR,
                              staged.size() * sizeof(T),
                              staged.data(), &status);
  check(status, "clCreateBuffer");
  return mem;
}

template <typename T>
void read_back(cl_command_queue queue, cl_mem mem, std::vector<double>& host) {
  std::vector<T> staged(host.size());
  check(clEnqueueReadBuffer(queue, mem, CL_TRUE, 0, staged.size() * sizeof(T),
                            staged.data(), 0, nullptr, nullptr),
        "clEnqueueReadBuffer");
  for (size_t i = 0; i < host.size(); ++i) host[i] = static_cast<double>(staged[i]);
}

}  // namespace

double OpenCLBackend::Impl::run(ClProgram& program, const LaunchPlan& plan,
                                OperandData& data, bool read_outputs) {
  const KernelSource& src = program.source;
  if (plan.local_size > spec.max_local_size)
    throw LaunchError("local size exceeds device limit");
  if (plan.scratch_bytes > local_mem_bytes)
    throw OutOfResources("scratch exceeds device local memory");

  const bool wide = src.precision == Precision::fp64;
  const uint32_t groups =
      static_cast<uint32_t>(plan.global_size / plan.local_size);
  const cl_uint nw = static_cast<cl_uint>(src.n / src.config.vector_width);
  const cl_uint m = static_cast<cl_uint>(src.m);

  auto input = [&](const std::vector<double>& host) {
    return wide ? make_buffer<double>(context, host, CL_MEM_READ_ONLY)
                : make_buffer<float>(context, host, CL_MEM_READ_ONLY);
  };
  auto output = [&](std::vector<double>& host) {
    return wide ? make_buffer<double>(context, host, CL_MEM_READ_WRITE)
                : make_buffer<float>(context, host, CL_MEM_READ_WRITE);
  };

  ClBuffer b0, b1, b2;
  cl_kernel kernel = program.kernel;
  cl_uint arg = 0;
  auto set_mem = [&](cl_mem mem) {
    check(clSetKernelArg(kernel, arg++, sizeof mem, &mem), "clSetKernelArg");
  };
  auto set_scalar_fp = [&](double value) {
    if (wide) {
      check(clSetKernelArg(kernel, arg++, sizeof value, &value), "clSetKernelArg");
    } else {
      float narrowed = static_cast<float>(value);
      check(clSetKernelArg(kernel, arg++, sizeof narrowed, &narrowed),
            "clSetKernelArg");
    }
  };
  auto set_uint = [&](cl_uint value) {
    check(clSetKernelArg(kernel, arg++, sizeof value, &value), "clSetKernelArg");
  };

  switch (src.kind) {
    case OpKind::Copy:
      data.x.assign(src.n, 0.0);
      b0.mem = input(data.y);
      b1.mem = output(data.x);
      set_mem(b0.mem);
      set_mem(b1.mem);
      set_uint(nw);
      break;
    case OpKind::Axpby:
      data.x.assign(src.n, 0.0);
      b0.mem = input(data.y);
      b1.mem = input(data.z);
      b2.mem = output(data.x);
      set_mem(b0.mem);
      set_mem(b1.mem);
      set_mem(b2.mem);
      set_scalar_fp(plan.alpha);
      set_scalar_fp(plan.beta);
      set_uint(nw);
      break;
    case OpKind::Dot:
      data.partials.assign(groups, 0.0);
      b0.mem = input(data.x);
      b1.mem = input(data.y);
      b2.mem = output(data.partials);
      set_mem(b0.mem);
      set_mem(b1.mem);
      set_mem(b2.mem);
      set_uint(nw);
      break;
    case OpKind::Gemv:
      data.x.assign(src.m, 0.0);
      b0.mem = input(data.a);
      b1.mem = input(data.y);
      b2.mem = output(data.x);
      set_mem(b0.mem);
      set_mem(b1.mem);
      set_mem(b2.mem);
      set_uint(m);
      set_uint(nw);
      break;
  }

  const size_t global = plan.global_size;
  const size_t local = plan.local_size;
  cl_event event = nullptr;
  cl_int status = clEnqueueNDRangeKernel(queue, kernel, 1, nullptr, &global, &local,
                                         0, nullptr, &event);
  if (status == CL_INVALID_WORK_GROUP_SIZE || status == CL_INVALID_WORK_ITEM_SIZE)
    throw LaunchError("invalid work sizes for device");
  if (status == CL_OUT_OF_RESOURCES)
    throw OutOfResources("kernel launch exhausted device resources");
  check(status, "clEnqueueNDRangeKernel");
  check(clWaitForEvents(1, &event), "clWaitForEvents");

  cl_ulong start = 0, end = 0;
  clGetEventProfilingInfo(event, CL_PROFILING_COMMAND_START, sizeof start, &start,
                          nullptr);
  clGetEventProfilingInfo(event, CL_PROFILING_COMMAND_END, sizeof end, &end, nullptr);
  clReleaseEvent(event);

  if (read_outputs) {
    std::vector<double>& out =
        src.kind == OpKind::Dot ? data.partials : data.x;
    cl_mem out_mem = src.kind == OpKind::Copy ? b1.mem : b2.mem;
    if (wide)
      read_back<double>(queue, out_mem, out);
    else
      read_back<float>(queue, out_mem, out);
  }
  check(clFinish(queue), "clFinish");
  return static_cast<double>(end - start) * 1e-9;
}

double OpenCLBackend::execute(ProgramHandle& handle, const LaunchPlan& plan,
                              OperandData& data) {
  return impl_->run(dynamic_cast<ClProgram&>(handle), plan, data, true);
}

double OpenCLBackend::execute_timed(ProgramHandle& handle, const LaunchPlan& plan,
                                    OperandData& data) {
  return impl_->run(dynamic_cast<ClProgram&>(handle), plan, data, false);
}

}  // namespace bwtune

#endif  // BWTUNE_HAVE_OPENCL
